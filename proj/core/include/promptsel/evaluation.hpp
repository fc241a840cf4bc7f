#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "promptsel/corpus.hpp"
#include "promptsel/decoder.hpp"

namespace promptsel {

/// Half-open token span [start, end) of one chunk type.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string type;

  friend auto operator<=>(const Span&, const Span&) = default;
};

/// Chunks under conlleval rules: B-X always opens a chunk; I-X opens one
/// unless it continues a chunk of type X; O or a type change closes the
/// current chunk. Result is sorted by start.
std::vector<Span> extract_spans(std::span<const std::string> labels);

struct LabelCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct EvalReport {
  Task task = Task::ner;
  // BIO tasks
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<std::string, LabelCounts> per_label;
  // all tasks
  double accuracy = 0.0;
  std::size_t n_sentences = 0;
  std::size_t n_tokens = 0;
  std::size_t correct_tokens = 0;
  std::size_t n_missing = 0;  // gold sentences without a prediction

  /// F1 for BIO tasks, accuracy for POS.
  double headline() const noexcept { return task == Task::pos ? accuracy : f1; }
};

/// Micro-averaged span precision/recall/F1. Predictions are aligned to gold
/// by test_id; an id absent from gold or a token-count mismatch throws
/// Error(alignment). Gold sentences without a prediction are skipped and
/// counted in n_missing.
EvalReport micro_f1(const PredictionSet& pred, const CorpusSplit& gold);

/// Fraction of tokens whose predicted label equals gold.
EvalReport token_accuracy(const PredictionSet& pred, const CorpusSplit& gold);

/// micro_f1 for BIO schemes, token_accuracy otherwise.
EvalReport evaluate(const PredictionSet& pred, const CorpusSplit& gold);

void write_report_table(const EvalReport& report, std::ostream& out);
void write_report_json(const EvalReport& report, std::ostream& out);

/// One line per sentence with at least one wrong label.
void write_error_listing(const PredictionSet& pred, std::ostream& out);

}  // namespace promptsel
