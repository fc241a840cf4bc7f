#pragma once

// Slow, direct reimplementations used as references in tests. Nothing here
// calls into the library's scoring or evaluation code.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

inline double sls(double len_a, double len_b, double temperature) {
  return 1.0 / (1.0 + std::exp(std::fabs(len_a - len_b) / temperature));
}

inline double entropy(const std::vector<std::string>& labels) {
  std::map<std::string, int> counts;
  for (const auto& l : labels) ++counts[l];
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(labels.size());
    h -= p * std::log(p) / std::log(2.0);
  }
  return h;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct Candidate {
  std::size_t id;
  std::size_t length;
  std::vector<std::string> labels;
  std::vector<double> embedding;
};

struct Scored {
  std::size_t id;
  double score;
};

/// Complexity scores of every candidate against one test sentence.
/// Entropy is divided by the largest entropy in the pool; when every entropy
/// is zero the entropy term counts as 1.
inline std::vector<Scored> score_all(const std::vector<Candidate>& pool, std::size_t test_length,
                                     const std::vector<double>& test_embedding, double w_len,
                                     double w_ent, double w_sim, double temperature) {
  std::vector<double> sims, lens, ents;
  for (const auto& c : pool) {
    sims.push_back(cosine(c.embedding, test_embedding));
    lens.push_back(sls(static_cast<double>(c.length), static_cast<double>(test_length), temperature));
    ents.push_back(entropy(c.labels));
  }
  const double max_sim = *std::max_element(sims.begin(), sims.end());
  const double max_len = *std::max_element(lens.begin(), lens.end());
  const double max_ent = *std::max_element(ents.begin(), ents.end());
  std::vector<Scored> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double ne = max_ent > 0 ? ents[i] / max_ent : 1.0;
    out.push_back({pool[i].id, w_len * lens[i] / max_len + w_ent * ne + w_sim * sims[i] / max_sim});
  }
  return out;
}

/// Full sort, best first, ties by ascending id, truncated to k.
inline std::vector<std::size_t> top_k(std::vector<Scored> scored, std::size_t k) {
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) ids.push_back(scored[i].id);
  return ids;
}

using Chunk = std::tuple<std::size_t, std::size_t, std::string>;  // start, end (exclusive), type

inline void split_tag(const std::string& label, std::string& prefix, std::string& type) {
  if (label == "O" || label.size() < 2 || label[1] != '-') {
    prefix = "O";
    type = "";
    return;
  }
  prefix = label.substr(0, 1);
  type = label.substr(2);
}

// The two predicates from the CoNLL shared-task scoring script.
inline bool end_of_chunk(const std::string& prev_tag, const std::string& tag,
                         const std::string& prev_type, const std::string& type) {
  if (prev_tag == "B" && tag == "B") return true;
  if (prev_tag == "B" && tag == "O") return true;
  if (prev_tag == "I" && tag == "B") return true;
  if (prev_tag == "I" && tag == "O") return true;
  if (prev_tag != "O" && prev_type != type) return true;
  return false;
}

inline bool start_of_chunk(const std::string& prev_tag, const std::string& tag,
                           const std::string& prev_type, const std::string& type) {
  if (prev_tag == "B" && tag == "B") return true;
  if (prev_tag == "I" && tag == "B") return true;
  if (prev_tag == "O" && tag == "B") return true;
  if (prev_tag == "O" && tag == "I") return true;
  if (tag != "O" && prev_type != type) return true;
  return false;
}

inline std::vector<Chunk> chunks(const std::vector<std::string>& labels) {
  std::vector<Chunk> out;
  std::string prev_tag = "O", prev_type;
  std::size_t start = 0;
  bool open = false;
  for (std::size_t i = 0; i <= labels.size(); ++i) {
    std::string tag = "O", type;
    if (i < labels.size()) split_tag(labels[i], tag, type);
    if (open && end_of_chunk(prev_tag, tag, prev_type, type)) {
      out.emplace_back(start, i, prev_type);
      open = false;
    }
    if (i < labels.size() && start_of_chunk(prev_tag, tag, prev_type, type)) {
      start = i;
      open = true;
    }
    prev_tag = tag;
    prev_type = type;
  }
  return out;
}

}  // namespace oracle
