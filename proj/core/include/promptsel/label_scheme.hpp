#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptsel {

enum class Task { ner, chunk, pos };
enum class SchemeKind { bio, flat };

std::string_view to_string(Task task) noexcept;
Task parse_task(std::string_view name);

/// Closed label vocabulary of one tagging task.
class LabelScheme {
 public:
  /// Throws Error(config) if labels are empty, duplicated, or (for bio)
  /// contain anything other than "O" and B-/I- prefixed labels.
  LabelScheme(Task task, std::vector<std::string> labels, SchemeKind kind);

  /// CoNLL2003 English NER: O plus B-/I- for PER, ORG, LOC, MISC.
  static LabelScheme conll2003_ner();
  /// CoNLL2000 chunking: O plus B-/I- for the eleven phrase types.
  static LabelScheme conll2000_chunk();
  /// Universal Dependencies UPOS (17 tags).
  static LabelScheme ud_upos();
  static LabelScheme for_task(Task task);

  Task task() const noexcept { return task_; }
  SchemeKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

  bool contains(std::string_view label) const;
  std::optional<std::size_t> index_of(std::string_view label) const;

  /// Label used when a model output cannot be mapped: "O" for BIO schemes,
  /// "NOUN" (the majority tag) for UPOS.
  const std::string& fallback_label() const noexcept { return fallback_; }

 private:
  Task task_;
  SchemeKind kind_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string fallback_;
};

/// Positions i where labels[i] is I-X and labels[i-1] is neither B-X nor I-X
/// (position 0 counts as following "O").
std::vector<std::size_t> find_bio_violations(std::span<const std::string> labels);

/// Rewrites every violating I-X to B-X; returns the number of rewrites.
std::size_t repair_bio(std::vector<std::string>& labels);

/// "B-ORG" -> "ORG"; "O" or an unprefixed label -> "".
std::string_view bio_type(std::string_view label) noexcept;

}  // namespace promptsel
