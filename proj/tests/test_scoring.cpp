#include <doctest.h>

#include <promptsel/error.hpp>
#include <promptsel/scoring.hpp>

#include <cmath>
#include <sstream>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace promptsel;
using testing_support::SplitMix64;

namespace {

std::vector<oracle::Candidate> oracle_pool(const CorpusSplit& pool, const std::vector<EmbeddingVector>& emb) {
  std::vector<oracle::Candidate> out;
  for (const auto& s : pool.sentences()) out.push_back({s.id, s.size(), s.labels, emb[s.id].values});
  return out;
}

}  // namespace

TEST_CASE("smoothed length similarity") {
  // 1 / (1 + e) for a length gap of one temperature.
  CHECK(smoothed_length_similarity(10, 13, 3.0) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-15));
  CHECK(std::fabs(smoothed_length_similarity(10, 13, 3.0) - 0.26894142) < 1e-8);
  CHECK(smoothed_length_similarity(13, 10, 3.0) == smoothed_length_similarity(10, 13, 3.0));
  CHECK(smoothed_length_similarity(7, 7, 3.0) == 0.5);
  CHECK(smoothed_length_similarity(5, 65, 3.0) < 1e-8);
  CHECK(smoothed_length_similarity(5, 6, 3.0) > smoothed_length_similarity(5, 7, 3.0));
}

TEST_CASE("label entropy") {
  const auto ner = LabelScheme::conll2003_ner();
  const std::vector<std::string> mixed{"O", "O", "O", "B-PER"};
  // -(3/4 log2 3/4 + 1/4 log2 1/4)
  CHECK(std::fabs(label_entropy(mixed, ner) - 0.81127812) < 1e-8);
  CHECK(label_entropy(std::vector<std::string>{"O", "O"}, ner) == 0.0);
  CHECK(label_entropy(std::vector<std::string>{"O", "B-PER", "I-PER", "B-LOC"}, ner) == 2.0);
  CHECK_THROWS_AS(label_entropy(std::vector<std::string>{}, ner), Error);
  CHECK_THROWS_AS(label_entropy(std::vector<std::string>{"NOUN"}, ner), Error);

  SplitMix64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto labels = testing_support::random_bio(rng, 1 + rng.below(30));
    CHECK(label_entropy(labels, ner) == doctest::Approx(oracle::entropy(labels)).epsilon(1e-12));
  }
}

TEST_CASE("normalize") {
  const std::vector<double> s{2, 4, 8};
  CHECK(normalize(s) == std::vector<double>{0.25, 0.5, 1.0});
  CHECK_THROWS_AS(normalize(std::vector<double>{}), Error);
  CHECK_THROWS_AS(normalize(std::vector<double>{0.0, 0.0}), Error);
  CHECK_THROWS_AS(normalize(std::vector<double>{-1.0, -2.0}), Error);
}

TEST_CASE("complexity score and presets") {
  SelectionConfig cfg = SelectionConfig::preset(Task::ner);
  CHECK(complexity_score(0.5, 0.0, 1.0, cfg) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(preset_weights(Task::ner) == Weights{0.25, 0.25, 0.5});
  CHECK(preset_weights(Task::chunk) == Weights{0.2, 0.1, 0.7});
  CHECK(preset_weights(Task::pos) == Weights{0.1, 0.1, 0.8});
  CHECK(cfg.k == 5);
  CHECK(cfg.temperature == 3.0);
  CHECK(cfg.provider_id == "all-MiniLM-L6-v2");
}

TEST_CASE("selection config validation") {
  SelectionConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.weights = {0, 0, 0};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.weights = {-0.1, 0.5, 0.6};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.weights = {0, 0, 1};
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.k = 5;
  cfg.temperature = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("pool scores agree with the brute-force oracle") {
  const auto pool = testing_support::random_ner_split(120, 17);
  const auto tests = testing_support::random_ner_split(10, 18, SplitName::test);
  const auto emb = testing_support::hash_embed_all(pool, 32);
  const auto test_emb = testing_support::hash_embed_all(tests, 32);
  const CandidatePool candidates(pool, emb);
  const auto opool = oracle_pool(pool, emb);
  const SelectionConfig cfg = SelectionConfig::preset(Task::ner);
  for (const auto& t : tests.sentences()) {
    const auto scores = candidates.score(t, test_emb[t.id], cfg, 3);
    const auto expected = oracle::score_all(opool, t.size(), test_emb[t.id].values, 0.25, 0.25, 0.5, 3.0);
    REQUIRE(scores.size() == expected.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      CHECK(scores[i].candidate_id == expected[i].id);
      CHECK(std::fabs(scores[i].complexity - expected[i].score) < 1e-12);
    }
    CHECK(select_top_k(scores, 5) == oracle::top_k(expected, 5));
    // Same scores regardless of thread count.
    const auto serial = candidates.score(t, test_emb[t.id], cfg, 1);
    for (std::size_t i = 0; i < scores.size(); ++i) CHECK(serial[i].complexity == scores[i].complexity);
  }
}

TEST_CASE("top-k ordering and ties") {
  std::vector<CandidateScore> scores(6);
  const double values[] = {0.3, 0.9, 0.5, 0.9, 0.1, 0.5};
  for (std::size_t i = 0; i < 6; ++i) {
    scores[i].candidate_id = i;
    scores[i].complexity = values[i];
  }
  CHECK(select_top_k(scores, 4) == std::vector<std::size_t>{1, 3, 2, 5});
  CHECK(select_top_k(scores, 10).size() == 6);
  CHECK_THROWS_AS(select_top_k(scores, 0), Error);
}

TEST_CASE("zero-entropy pool keeps the entropy term constant") {
  const auto pool = make_split(SplitName::train, LabelScheme::conll2003_ner(),
                               {{{"a", "b"}, {"O", "O"}}, {{"c", "d", "e"}, {"O", "O", "O"}}});
  const std::vector<EmbeddingVector> emb{{"p", {1, 0}}, {"p", {0, 1}}};
  const CandidatePool candidates(pool, emb);
  TaggedSentence test{0, 0, {"x", "y"}, {"O", "O"}, std::nullopt};
  SelectionConfig cfg;
  cfg.weights = {0, 1, 0};
  const auto scores = candidates.score(test, {"p", {1, 1}}, cfg);
  CHECK(scores[0].norm_entropy == 1.0);
  CHECK(scores[1].norm_entropy == 1.0);
}

TEST_CASE("nonpositive similarity maximum is a normalization error") {
  const auto pool = make_split(SplitName::train, LabelScheme::conll2003_ner(), {{{"a"}, {"O"}}, {{"b"}, {"B-PER"}}});
  const std::vector<EmbeddingVector> emb{{"p", {-1, 0}}, {"p", {0, -1}}};
  const CandidatePool candidates(pool, emb);
  TaggedSentence test{0, 0, {"x"}, {"O"}, std::nullopt};
  try {
    candidates.score(test, {"p", {1, 1}}, SelectionConfig{});
    FAIL("expected normalization error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::normalization);
  }
}

TEST_CASE("duplicate exclusion and nearest neighbours") {
  const auto pool = make_split(SplitName::train, LabelScheme::conll2003_ner(),
                               {{{"a", "b"}, {"O", "O"}}, {{"c"}, {"O"}}, {{"a", "c"}, {"O", "B-LOC"}}});
  const auto emb = testing_support::hash_embed_all(pool, 16);
  const CandidatePool candidates(pool, emb);
  const TaggedSentence test{0, 0, {"a", "b"}, {"O", "O"}, std::nullopt};
  const auto test_emb = hash_embed(test, 16, 0);

  SelectionConfig cfg;
  cfg.exclude_duplicates = true;
  const auto scores = candidates.score(test, test_emb, cfg);
  CHECK(scores.size() == 2);
  for (const auto& s : scores) CHECK(s.candidate_id != 0);

  CHECK(select_nearest(candidates, test_emb, 1).front() == 0);
  CHECK(select_nearest(candidates, test_emb, 1, &test).front() != 0);
  CHECK_THROWS_AS(CandidatePool(pool, std::vector<EmbeddingVector>(2)), Error);
}

TEST_CASE("score dump has one record per candidate") {
  std::vector<CandidateScore> scores(2);
  scores[1].candidate_id = 7;
  std::ostringstream out;
  write_score_dump(3, scores, out);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("\"candidate_id\":7") != std::string::npos);
  CHECK(text.find("\"test_id\":3") != std::string::npos);
}
