#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "promptsel/corpus.hpp"
#include "promptsel/embedder.hpp"

namespace promptsel {

/// Weights of the three normalized metrics in the complexity score.
struct Weights {
  double length = 0.0;      // smoothed length similarity
  double entropy = 0.0;     // label entropy
  double similarity = 1.0;  // sentence-embedding cosine

  friend bool operator==(const Weights&, const Weights&) = default;
};

/// Tuned weights: NER (0.25, 0.25, 0.5), chunking (0.2, 0.1, 0.7),
/// POS (0.1, 0.1, 0.8), in (length, entropy, similarity) order.
Weights preset_weights(Task task);

struct SelectionConfig {
  Weights weights;
  std::size_t k = 5;
  double temperature = 3.0;  // SLS sigmoid temperature
  std::string provider_id = std::string(kDefaultProviderId);
  /// Drop pool sentences whose token sequence equals the test sentence.
  bool exclude_duplicates = false;

  static SelectionConfig preset(Task task);
  /// Throws Error(config) on negative weights, an all-zero triple, k == 0 or
  /// a nonpositive temperature.
  void validate() const;
};

/// (1 + exp(|len_a - len_b| / T))^-1, in (0, 0.5].
double smoothed_length_similarity(std::size_t len_a, std::size_t len_b, double temperature);

/// Base-2 Shannon entropy of the empirical label distribution. Throws
/// Error(domain) for an empty list or a label outside the scheme.
double label_entropy(std::span<const std::string> labels, const LabelScheme& scheme);

/// Divides every element by the maximum. Throws Error(normalization) when the
/// list is empty or the maximum is not positive.
std::vector<double> normalize(std::span<const double> scores);

double complexity_score(double norm_sls, double norm_entropy, double norm_sim,
                        const SelectionConfig& cfg) noexcept;

struct CandidateScore {
  std::size_t candidate_id = 0;
  double raw_sim = 0.0;
  double raw_sls = 0.0;
  double raw_entropy = 0.0;
  double norm_sim = 0.0;
  double norm_sls = 0.0;
  double norm_entropy = 0.0;
  double complexity = 0.0;
};

/// A training pool with its embeddings and the test-independent entropy
/// column precomputed once.
class CandidatePool {
 public:
  /// `embeddings` must be empty (static selection only) or aligned with the
  /// pool's sentence ids.
  CandidatePool(const CorpusSplit& pool, std::vector<EmbeddingVector> embeddings);

  const CorpusSplit& split() const noexcept { return pool_; }
  std::span<const EmbeddingVector> embeddings() const noexcept { return embeddings_; }
  std::span<const double> entropies() const noexcept { return entropies_; }
  std::size_t size() const noexcept { return pool_.size(); }

  /// Scores every candidate against `test`. Normalization of similarity and
  /// length is over the candidates scored for this test sentence; entropy is
  /// normalized by the pool-wide maximum. `jobs` threads share the
  /// per-candidate phase; output does not depend on it.
  std::vector<CandidateScore> score(const TaggedSentence& test, const EmbeddingVector& test_embedding,
                                    const SelectionConfig& cfg, std::size_t jobs = 1) const;

 private:
  const CorpusSplit& pool_;
  std::vector<EmbeddingVector> embeddings_;
  std::vector<double> entropies_;
  double max_entropy_ = 0.0;
};

std::vector<CandidateScore> score_pool(const TaggedSentence& test,
                                       const EmbeddingVector& test_embedding,
                                       const CorpusSplit& pool,
                                       std::span<const EmbeddingVector> pool_embeddings,
                                       const SelectionConfig& cfg);

/// Ids of the k highest complexity scores, best first; ties go to the lower
/// candidate id. Returns every candidate (with a warning) when fewer than k.
std::vector<std::size_t> select_top_k(std::span<const CandidateScore> scores, std::size_t k);

/// k nearest neighbours by raw cosine similarity, same ordering contract as
/// select_top_k.
std::vector<std::size_t> select_nearest(const CandidatePool& pool,
                                        const EmbeddingVector& test_embedding, std::size_t k,
                                        const TaggedSentence* exclude_duplicates_of = nullptr);

/// One JSON object per candidate: test_id, candidate_id and every score field.
void write_score_dump(std::size_t test_id, std::span<const CandidateScore> scores, std::ostream& out);

}  // namespace promptsel
