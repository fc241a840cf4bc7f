#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "promptsel/corpus.hpp"

namespace promptsel {

/// Default provider id, a 384-dimensional MiniLM sentence encoder reached
/// through a remote endpoint or a pre-exported vector file.
inline constexpr std::string_view kDefaultProviderId = "all-MiniLM-L6-v2";
inline constexpr std::size_t kDefaultEmbeddingDim = 384;

struct EmbeddingVector {
  std::string provider_id;
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
};

/// dot(a,b) / (|a| |b|). Throws Error(domain) on a dimension mismatch or a
/// zero-norm vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Hashed bag-of-tokens embedding, L2-normalized. Each token contributes +1
/// or -1 at one hashed coordinate. Deterministic in (tokens, dim, seed) and
/// independent of token order.
EmbeddingVector hash_embed(std::span<const std::string> tokens, std::size_t dim,
                           std::uint64_t seed);
EmbeddingVector hash_embed(const TaggedSentence& sentence, std::size_t dim, std::uint64_t seed);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  /// One vector per text, in order. Implementations may throw
  /// Error(retrieval) or Error(transport).
  virtual std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts) = 0;
  /// Largest batch the provider accepts in a single call.
  virtual std::size_t max_batch() const { return 64; }
};

/// Offline provider backed by hash_embed(); tokens are recovered by
/// splitting the text on spaces.
class HashEmbedder final : public EmbeddingProvider {
 public:
  explicit HashEmbedder(std::size_t dim = kDefaultEmbeddingDim, std::uint64_t seed = 0);

  std::string id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts) override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Vectors exported ahead of time, one JSON object per line:
/// {"text": "...", "values": [...]}. Unknown texts raise Error(retrieval).
class VectorFileProvider final : public EmbeddingProvider {
 public:
  VectorFileProvider(std::string provider_id, const std::string& path);

  std::string id() const override { return id_; }
  std::size_t dim() const override { return dim_; }
  std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts) override;

 private:
  std::string id_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

struct RemoteEmbeddingOptions {
  std::string url;            // e.g. http://localhost:8080/embed
  std::string provider_id = std::string(kDefaultProviderId);
  std::size_t dim = kDefaultEmbeddingDim;
  std::string auth_token;     // sent as "Authorization: Bearer <token>" when set
  std::size_t batch_size = 64;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::seconds timeout{30};
};

/// POST {"texts": [...]} -> {"vectors": [[...], ...]}.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEmbeddingOptions options);

  std::string id() const override { return options_.provider_id; }
  std::size_t dim() const override { return options_.dim; }
  std::size_t max_batch() const override { return options_.batch_size; }
  std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts) override;

 private:
  RemoteEmbeddingOptions options_;
};

/// Cache key: hex SHA-256 of the space-joined token sequence.
std::string embedding_key(std::string_view text);

/// Content-addressed store of embeddings, optionally persisted as JSON lines
/// {"key","provider","dim","values"}. Reads are concurrent; writes are
/// serialized and appended to the backing file immediately.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  /// Loads existing entries from `path` (if present) and appends new ones to it.
  explicit EmbeddingCache(std::string path);

  EmbeddingCache(const EmbeddingCache&) = delete;
  EmbeddingCache& operator=(const EmbeddingCache&) = delete;

  std::optional<EmbeddingVector> find(std::string_view provider_id, std::string_view key) const;
  void store(std::string_view key, const EmbeddingVector& vec);

  std::size_t size() const;
  const std::string& path() const noexcept { return path_; }

 private:
  static std::string slot(std::string_view provider_id, std::string_view key);

  std::string path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
  std::ofstream sink_;
};

struct EmbedStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t provider_calls = 0;
};

/// Cache-first embedding front end.
class Embedder {
 public:
  Embedder(EmbeddingProvider& provider, EmbeddingCache& cache, std::size_t max_in_flight = 4);

  /// Cache hit, or a provider call written through to the cache. Throws
  /// Error(retrieval) naming the sentence id if the provider fails, and
  /// Error(integrity) if the returned vector is malformed.
  EmbeddingVector embed(const TaggedSentence& sentence);

  /// Embeds a whole split, batching cache misses and issuing up to
  /// max_in_flight provider calls at once. Result is indexed by sentence id.
  std::vector<EmbeddingVector> embed_all(const CorpusSplit& split);

  EmbedStats stats() const;
  const EmbeddingProvider& provider() const noexcept { return provider_; }

 private:
  EmbeddingVector checked(std::vector<double> values, std::string_view what) const;

  EmbeddingProvider& provider_;
  EmbeddingCache& cache_;
  std::size_t max_in_flight_;
  mutable std::mutex stats_mutex_;
  EmbedStats stats_;
};

}  // namespace promptsel
