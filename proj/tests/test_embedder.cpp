#include <doctest.h>

#include <promptsel/embedder.hpp>
#include <promptsel/error.hpp>
#include <promptsel/hashing.hpp>
#include <promptsel/plm_client.hpp>

#include <atomic>
#include <cmath>
#include <fstream>

#include "support/http_fixture.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace promptsel;
using testing_support::SplitMix64;

namespace {

// Counts calls and texts; answers with hash embeddings.
class CountingProvider final : public EmbeddingProvider {
 public:
  explicit CountingProvider(std::size_t batch = 64) : batch_(batch) {}
  std::string id() const override { return "counting"; }
  std::size_t dim() const override { return 16; }
  std::size_t max_batch() const override { return batch_; }
  std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts) override {
    ++calls;
    texts_seen += texts.size();
    return HashEmbedder(16, 1).embed_texts(texts);
  }
  std::atomic<std::size_t> calls{0};
  std::atomic<std::size_t> texts_seen{0};

 private:
  std::size_t batch_;
};

class BrokenProvider final : public EmbeddingProvider {
 public:
  explicit BrokenProvider(int mode) : mode_(mode) {}
  std::string id() const override { return "broken"; }
  std::size_t dim() const override { return 4; }
  std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts) override {
    if (mode_ == 0) throw std::runtime_error("service down");
    if (mode_ == 1) return std::vector<std::vector<double>>(texts.size(), std::vector<double>(3, 1.0));
    return std::vector<std::vector<double>>(texts.size(), {1.0, NAN, 0.0, 0.0});
  }

 private:
  int mode_;
};

class NullClient final : public CompletionClient {
 public:
  CompletionResponse complete(const CompletionRequest&) override { return {"O", "stop"}; }
};

}  // namespace

TEST_CASE("sha256 matches the standard test vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("cosine similarity") {
  const std::vector<double> a{1, 0}, b{1, 1}, c{0, 3}, z{0, 0};
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.70710678).epsilon(1e-9));
  CHECK(cosine_similarity(a, c) == doctest::Approx(0.0));
  CHECK(cosine_similarity(a, a) == 1.0);
  CHECK_THROWS_AS(cosine_similarity(a, z), Error);
  CHECK_THROWS_AS(cosine_similarity(a, std::vector<double>{1, 2, 3}), Error);

  SplitMix64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto u = testing_support::random_unit(rng, 24);
    const auto v = testing_support::random_unit(rng, 24);
    CHECK(cosine_similarity(u, v) == doctest::Approx(oracle::cosine(u, v)).epsilon(1e-12));
  }
}

TEST_CASE("hash embeddings are unit norm, deterministic and order independent") {
  const std::vector<std::string> tokens{"EU", "rejects", "German", "call"};
  const std::vector<std::string> shuffled{"call", "German", "EU", "rejects"};
  const auto a = hash_embed(tokens, 64, 3);
  const auto b = hash_embed(shuffled, 64, 3);
  CHECK(a.values == b.values);
  CHECK(a.provider_id == "hash-64-3");
  double norm = 0;
  for (double v : a.values) norm += v * v;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hash_embed(tokens, 64, 4).values != a.values);
  CHECK(hash_embed(std::vector<std::string>{}, 8, 0).dim() == 8);
}

TEST_CASE("hash embeddings rank token overlap") {
  // Sentences sharing 9 of 10 tokens must be closer than sentences sharing none.
  SplitMix64 rng(11);
  int wins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> base, near, far;
    for (int i = 0; i < 10; ++i) base.push_back("t" + std::to_string(rng.below(1000000)));
    near = base;
    near[9] = "n" + std::to_string(trial);
    for (int i = 0; i < 10; ++i) far.push_back("f" + std::to_string(rng.below(1000000)));
    const auto e = hash_embed(base, kDefaultEmbeddingDim, 0);
    if (cosine_similarity(e, hash_embed(near, kDefaultEmbeddingDim, 0)) >
        cosine_similarity(e, hash_embed(far, kDefaultEmbeddingDim, 0))) {
      ++wins;
    }
  }
  CHECK(wins == 100);
}

TEST_CASE("cache keys are content hashes") {
  CHECK(embedding_key("EU rejects") == sha256_hex("EU rejects"));
  CHECK(embedding_key("EU rejects") != embedding_key("EU  rejects"));
}

TEST_CASE("embed_all deduplicates, batches and writes through") {
  const auto dir = testing_support::scratch_dir("embed-cache");
  const std::string path = dir + "/cache.jsonl";
  auto split = make_split(SplitName::train, LabelScheme::conll2003_ner(),
                          {{{"a", "b"}, {"O", "O"}}, {{"c"}, {"O"}}, {{"a", "b"}, {"O", "B-PER"}},
                           {{"d"}, {"O"}}, {{"e"}, {"O"}}});
  CountingProvider provider(2);
  {
    EmbeddingCache cache(path);
    Embedder embedder(provider, cache, 3);
    const auto vecs = embedder.embed_all(split);
    REQUIRE(vecs.size() == 5);
    CHECK(vecs[0].values == vecs[2].values);
    CHECK(provider.texts_seen == 4);
    CHECK(provider.calls == 2);
    CHECK(cache.size() == 4);
    CHECK(embedder.stats().hits == 0);

    embedder.embed_all(split);
    CHECK(provider.texts_seen == 4);
    CHECK(embedder.stats().hits == 5);
  }
  // A fresh cache reloads from disk; no provider calls needed.
  EmbeddingCache reloaded(path);
  CHECK(reloaded.size() == 4);
  CountingProvider second;
  Embedder embedder(second, reloaded);
  const auto again = embedder.embed_all(split);
  CHECK(second.calls == 0);
  CHECK(again[1].values == HashEmbedder(16, 1).embed_texts(std::vector<std::string>{"c"})[0]);
  CHECK(embedder.embed(split[3]).values == again[3].values);
  CHECK(embedder.stats().hits == 6);
}

TEST_CASE("embedding provider failures") {
  auto split = make_split(SplitName::train, LabelScheme::conll2003_ner(), {{{"a"}, {"O"}}, {{"b"}, {"O"}}});
  EmbeddingCache cache;
  BrokenProvider down(0), wrong_dim(1), nan(2);
  try {
    Embedder(down, cache).embed_all(split);
    FAIL("expected retrieval error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::retrieval);
    CHECK(std::string(e.what()).find("sentence 0") != std::string::npos);
  }
  try {
    Embedder(down, cache).embed(split[1]);
    FAIL("expected retrieval error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::retrieval);
    CHECK(std::string(e.what()).find("sentence 1") != std::string::npos);
  }
  try {
    Embedder(wrong_dim, cache).embed_all(split);
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::integrity);
  }
  try {
    Embedder(nan, cache).embed(split[0]);
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::integrity);
  }
}

TEST_CASE("corrupt cache file is an integrity error") {
  const auto dir = testing_support::scratch_dir("embed-corrupt");
  {
    std::ofstream f(dir + "/cache.jsonl");
    f << "{\"key\":\"x\",\"provider\":\"p\",\"dim\":3,\"values\":[1,2]}\n";
  }
  try {
    EmbeddingCache cache(dir + "/cache.jsonl");
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::integrity);
  }
}

TEST_CASE("vector file provider") {
  const auto dir = testing_support::scratch_dir("embed-vectors");
  {
    std::ofstream f(dir + "/vectors.jsonl");
    f << "{\"text\":\"EU rejects\",\"values\":[1,0,0]}\n{\"text\":\"Peter\",\"values\":[0,1,0]}\n";
  }
  VectorFileProvider provider("all-MiniLM-L6-v2", dir + "/vectors.jsonl");
  CHECK(provider.dim() == 3);
  CHECK(provider.id() == "all-MiniLM-L6-v2");
  const std::vector<std::string> texts{"Peter"};
  CHECK(provider.embed_texts(texts)[0] == std::vector<double>{0, 1, 0});
  const std::vector<std::string> unknown{"nobody"};
  CHECK_THROWS_AS(provider.embed_texts(unknown), Error);
}

TEST_CASE("remote embedding provider over HTTP") {
  NullClient client;
  testing_support::LocalServer server(client, 32);
  RemoteEmbeddingOptions options;
  options.url = server.url("/embed");
  options.provider_id = "remote-test";
  options.dim = 32;
  options.batch_size = 3;
  options.auth_token = "secret";
  options.initial_backoff = std::chrono::milliseconds(1);
  RemoteEmbeddingProvider provider(options);

  const auto split = testing_support::random_ner_split(10, 2);
  EmbeddingCache cache;
  Embedder embedder(provider, cache, 2);
  server.fail_next(1, 503);
  const auto vecs = embedder.embed_all(split);
  REQUIRE(vecs.size() == 10);
  CHECK(vecs[4].values == HashEmbedder(32, 7).embed_texts(std::vector<std::string>{split[4].text()})[0]);
  CHECK(vecs[4].provider_id == "remote-test");
  CHECK(server.last_authorization() == "Bearer secret");

  server.fail_next(100, 503);
  options.max_retries = 1;
  RemoteEmbeddingProvider flaky(options);
  const std::vector<std::string> one{"x"};
  try {
    flaky.embed_texts(one);
    FAIL("expected transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::transport);
  }
  server.fail_next(0, 503);

  server.fail_next(1, 400);
  try {
    provider.embed_texts(one);
    FAIL("expected request error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::request);
  }
}
