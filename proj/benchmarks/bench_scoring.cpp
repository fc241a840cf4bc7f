#include <benchmark/benchmark.h>

#include <promptsel/promptsel.hpp>

#include <random>
#include <string>
#include <vector>

using namespace promptsel;

namespace {

const std::vector<std::string> kTags{"O", "O", "O", "B-PER", "I-PER", "B-ORG", "B-LOC", "B-MISC", "I-MISC"};

CorpusSplit random_split(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> rows;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t len = 3 + rng() % 25;
    std::vector<std::string> tokens, labels;
    for (std::size_t i = 0; i < len; ++i) {
      tokens.push_back("w" + std::to_string(rng() % 2000));
      std::string tag = kTags[rng() % kTags.size()];
      if (tag.starts_with("I-") && (labels.empty() || bio_type(labels.back()) != bio_type(tag))) tag = "O";
      labels.push_back(tag);
    }
    rows.emplace_back(std::move(tokens), std::move(labels));
  }
  return make_split(SplitName::train, LabelScheme::conll2003_ner(), rows);
}

std::vector<EmbeddingVector> embed(const CorpusSplit& split) {
  std::vector<EmbeddingVector> out;
  for (const auto& s : split.sentences()) out.push_back(hash_embed(s, kDefaultEmbeddingDim, 0));
  return out;
}

void BM_ScorePool(benchmark::State& state) {
  const auto pool_split = random_split(static_cast<std::size_t>(state.range(0)), 1);
  const CandidatePool pool(pool_split, embed(pool_split));
  const auto tests = random_split(1, 2);
  const auto test_emb = hash_embed(tests[0], kDefaultEmbeddingDim, 0);
  const auto cfg = SelectionConfig::preset(Task::ner);
  for (auto _ : state) {
    auto scores = pool.score(tests[0], test_emb, cfg, 1);
    benchmark::DoNotOptimize(select_top_k(scores, cfg.k));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScorePool)->Arg(1000)->Arg(14000);

void BM_ExtractSpans(benchmark::State& state) {
  const auto split = random_split(1000, 3);
  std::size_t tokens = 0;
  for (auto _ : state) {
    for (const auto& s : split.sentences()) {
      benchmark::DoNotOptimize(extract_spans(s.labels));
      tokens += s.size();
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(tokens));
}
BENCHMARK(BM_ExtractSpans);

void BM_HashEmbed(benchmark::State& state) {
  const auto split = random_split(1000, 4);
  for (auto _ : state) {
    for (const auto& s : split.sentences()) benchmark::DoNotOptimize(hash_embed(s, kDefaultEmbeddingDim, 0));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_HashEmbed);

}  // namespace
BENCHMARK_MAIN();
