#include "promptsel/scoring.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <ostream>

#include "promptsel/error.hpp"
#include "promptsel/parallel.hpp"

namespace promptsel {

Weights preset_weights(Task task) {
  switch (task) {
    case Task::ner: return {0.25, 0.25, 0.5};
    case Task::chunk: return {0.2, 0.1, 0.7};
    case Task::pos: return {0.1, 0.1, 0.8};
  }
  return {};
}

SelectionConfig SelectionConfig::preset(Task task) {
  SelectionConfig cfg;
  cfg.weights = preset_weights(task);
  return cfg;
}

void SelectionConfig::validate() const {
  const auto& w = weights;
  if (!(w.length >= 0.0 && w.entropy >= 0.0 && w.similarity >= 0.0)) {
    throw Error(ErrorKind::config, "weights must be nonnegative");
  }
  if (!(w.length + w.entropy + w.similarity > 0.0)) {
    throw Error(ErrorKind::config, "at least one weight must be positive");
  }
  if (k == 0) throw Error(ErrorKind::config, "k must be at least 1");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorKind::config, "length-similarity temperature must be positive");
  }
}

double smoothed_length_similarity(std::size_t len_a, std::size_t len_b, double temperature) {
  const double diff = len_a > len_b ? static_cast<double>(len_a - len_b)
                                    : static_cast<double>(len_b - len_a);
  return 1.0 / (1.0 + std::exp(diff / temperature));
}

double label_entropy(std::span<const std::string> labels, const LabelScheme& scheme) {
  if (labels.empty()) throw Error(ErrorKind::domain, "entropy of an empty label list");
  std::vector<std::size_t> counts(scheme.size(), 0);
  for (const auto& label : labels) {
    auto idx = scheme.index_of(label);
    if (!idx) throw Error(ErrorKind::domain, "label '" + label + "' is not in the scheme");
    ++counts[*idx];
  }
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  // -0.0 for single-label lists
  return h == 0.0 ? 0.0 : h;
}

std::vector<double> normalize(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::normalization, "cannot normalize an empty list");
  const double max = *std::max_element(scores.begin(), scores.end());
  if (!(max > 0.0)) {
    throw Error(ErrorKind::normalization,
                "cannot normalize by a nonpositive maximum (" + std::to_string(max) + ")");
  }
  std::vector<double> out(scores.size());
  std::transform(scores.begin(), scores.end(), out.begin(), [max](double s) { return s / max; });
  return out;
}

double complexity_score(double norm_sls, double norm_entropy, double norm_sim,
                        const SelectionConfig& cfg) noexcept {
  const auto& w = cfg.weights;
  return w.length * norm_sls + w.entropy * norm_entropy + w.similarity * norm_sim;
}

CandidatePool::CandidatePool(const CorpusSplit& pool, std::vector<EmbeddingVector> embeddings)
    : pool_(pool), embeddings_(std::move(embeddings)) {
  if (!embeddings_.empty() && embeddings_.size() != pool_.size()) {
    throw Error(ErrorKind::integrity, "pool has " + std::to_string(pool_.size()) + " sentences but " +
                                          std::to_string(embeddings_.size()) + " embeddings");
  }
  entropies_.reserve(pool_.size());
  for (const auto& s : pool_.sentences()) {
    entropies_.push_back(label_entropy(s.labels, pool_.scheme()));
  }
  if (!entropies_.empty()) max_entropy_ = *std::max_element(entropies_.begin(), entropies_.end());
}

std::vector<CandidateScore> CandidatePool::score(const TaggedSentence& test,
                                                 const EmbeddingVector& test_embedding,
                                                 const SelectionConfig& cfg, std::size_t jobs) const {
  cfg.validate();
  if (embeddings_.size() != pool_.size()) {
    throw Error(ErrorKind::retrieval, "pool embeddings are not available");
  }
  const auto sentences = pool_.sentences();
  std::vector<std::size_t> ids;
  ids.reserve(sentences.size());
  for (const auto& s : sentences) {
    if (cfg.exclude_duplicates && s.tokens == test.tokens) continue;
    ids.push_back(s.id);
  }
  std::vector<CandidateScore> out(ids.size());
  if (ids.empty()) return out;

  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const auto& cand = sentences[ids[i]];
    auto& c = out[i];
    c.candidate_id = cand.id;
    c.raw_sim = cosine_similarity(embeddings_[cand.id], test_embedding);
    c.raw_sls = smoothed_length_similarity(cand.size(), test.size(), cfg.temperature);
    c.raw_entropy = entropies_[cand.id];
  });

  double max_sim = out.front().raw_sim;
  double max_sls = out.front().raw_sls;
  for (const auto& c : out) {
    max_sim = std::max(max_sim, c.raw_sim);
    max_sls = std::max(max_sls, c.raw_sls);
  }
  if (!(max_sim > 0.0)) {
    throw Error(ErrorKind::normalization,
                "test sentence " + std::to_string(test.id) +
                    ": maximum cosine similarity over the pool is not positive");
  }
  // A pool where every sentence carries a single label has zero entropy
  // everywhere; the column is then constant and treated as all ones.
  const bool flat_entropy = !(max_entropy_ > 0.0);
  for (auto& c : out) {
    c.norm_sim = c.raw_sim / max_sim;
    c.norm_sls = c.raw_sls / max_sls;
    c.norm_entropy = flat_entropy ? 1.0 : c.raw_entropy / max_entropy_;
    c.complexity = complexity_score(c.norm_sls, c.norm_entropy, c.norm_sim, cfg);
  }
  return out;
}

std::vector<CandidateScore> score_pool(const TaggedSentence& test,
                                       const EmbeddingVector& test_embedding,
                                       const CorpusSplit& pool,
                                       std::span<const EmbeddingVector> pool_embeddings,
                                       const SelectionConfig& cfg) {
  CandidatePool candidates(pool, {pool_embeddings.begin(), pool_embeddings.end()});
  return candidates.score(test, test_embedding, cfg);
}

namespace {

template <typename Key>
std::vector<std::size_t> top_ids(std::vector<std::pair<Key, std::size_t>> keyed, std::size_t k) {
  if (keyed.size() < k) {
    spdlog::warn("pool has {} candidates, fewer than k={}; selecting all", keyed.size(), k);
    k = keyed.size();
  }
  auto better = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k), keyed.end(), better);
  std::vector<std::size_t> ids;
  ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(keyed[i].second);
  return ids;
}

}  // namespace

std::vector<std::size_t> select_top_k(std::span<const CandidateScore> scores, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::config, "k must be at least 1");
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(scores.size());
  for (const auto& c : scores) keyed.emplace_back(c.complexity, c.candidate_id);
  return top_ids(std::move(keyed), k);
}

std::vector<std::size_t> select_nearest(const CandidatePool& pool,
                                        const EmbeddingVector& test_embedding, std::size_t k,
                                        const TaggedSentence* exclude_duplicates_of) {
  if (k == 0) throw Error(ErrorKind::config, "k must be at least 1");
  const auto embeddings = pool.embeddings();
  if (embeddings.size() != pool.size()) {
    throw Error(ErrorKind::retrieval, "pool embeddings are not available");
  }
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(pool.size());
  for (const auto& s : pool.split().sentences()) {
    if (exclude_duplicates_of && s.tokens == exclude_duplicates_of->tokens) continue;
    keyed.emplace_back(cosine_similarity(embeddings[s.id], test_embedding), s.id);
  }
  return top_ids(std::move(keyed), k);
}

void write_score_dump(std::size_t test_id, std::span<const CandidateScore> scores, std::ostream& out) {
  for (const auto& c : scores) {
    nlohmann::json j{{"test_id", test_id},        {"candidate_id", c.candidate_id},
                     {"raw_sim", c.raw_sim},      {"raw_sls", c.raw_sls},
                     {"raw_entropy", c.raw_entropy}, {"norm_sim", c.norm_sim},
                     {"norm_sls", c.norm_sls},    {"norm_entropy", c.norm_entropy},
                     {"complexity", c.complexity}};
    out << j.dump() << '\n';
  }
}

}  // namespace promptsel
