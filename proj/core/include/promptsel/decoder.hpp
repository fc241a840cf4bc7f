#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptsel/corpus.hpp"
#include "promptsel/plm_client.hpp"
#include "promptsel/prompting.hpp"
#include "promptsel/scoring.hpp"

namespace promptsel {

enum class RepairKind {
  exact,             // already a scheme label
  case_insensitive,  // "b-org" -> "B-ORG"
  prefix,            // unique longest common prefix with a scheme label
  fallback,          // nothing matched: "O", or "NOUN" for POS
};

std::string_view to_string(RepairKind kind) noexcept;

struct RepairedLabel {
  std::string label;
  RepairKind kind = RepairKind::exact;
};

/// Maps a raw model output unit onto the scheme: exact match, then
/// case-insensitive match, then the single label sharing the longest
/// (case-insensitive) common prefix; ties and empty prefixes fall back.
RepairedLabel repair_label(std::string_view raw, const LabelScheme& scheme);

struct LabelRepair {
  std::size_t position = 0;
  std::string raw;
  std::string label;
  RepairKind kind = RepairKind::fallback;
};

struct DecodeOptions {
  PromptFormat format;
  int max_tokens = 8;
  /// The completion for one label stops at the first space.
  std::vector<std::string> stop = {" ", "\n"};
  double temperature = 0.0;
};

struct DecodedSentence {
  std::vector<std::string> labels;
  std::vector<LabelRepair> repairs;
};

/// Structured-prompting loop: append "token_", ask for a completion, keep
/// its first whitespace-delimited unit as the label (repaired onto the
/// scheme), append it and move to the next token. Returns one label per test
/// token. Transport errors propagate.
DecodedSentence decode_sentence(const RenderedPrompt& prompt, const TaggedSentence& test,
                                CompletionClient& client, const LabelScheme& scheme,
                                const DecodeOptions& options = {});

enum class Strategy { cp, knn, static_examples };
Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy strategy) noexcept;

struct Prediction {
  std::size_t test_id = 0;
  std::vector<std::string> tokens;
  std::vector<std::string> gold;
  std::vector<std::string> predicted;
  std::vector<std::size_t> example_ids;
  std::string prompt_hash;
  std::vector<LabelRepair> repairs;
};

struct SentenceFailure {
  std::size_t test_id = 0;
  std::string prompt_hash;  // empty when selection itself failed
  std::string message;
};

struct PredictionSet {
  Task task = Task::ner;
  std::vector<Prediction> predictions;  // ordered by test_id
  std::vector<SentenceFailure> failures;

  const Prediction* find(std::size_t test_id) const;
};

/// JSON lines {test_id, tokens, gold, predicted, example_ids, prompt_hash,
/// repairs}; failures are written as {test_id, prompt_hash, error}.
void write_predictions(const PredictionSet& set, std::ostream& out);
PredictionSet read_predictions(std::istream& in, Task task);

struct RunOptions {
  Strategy strategy = Strategy::cp;
  SelectionConfig selection;
  std::vector<std::size_t> static_ids;  // used by Strategy::static_examples
  ExampleOrder order = ExampleOrder::descending;
  std::uint64_t seed = 0;
  DecodeOptions decode;
  std::size_t jobs = 1;
  /// Earlier run whose predictions are reused when the prompt hash matches.
  const PredictionSet* resume = nullptr;
  /// When set, each sentence's prompt is handed here (e.g. for export).
  std::function<void(const RenderedPrompt&)> on_prompt;
};

/// Example ids chosen for one test sentence, best first.
std::vector<std::size_t> select_examples(const TaggedSentence& test,
                                         const EmbeddingVector* test_embedding,
                                         const CandidatePool& pool, const RunOptions& options);

/// Selects, renders and decodes every test sentence. Per-sentence failures
/// are recorded in PredictionSet::failures and skipped.
PredictionSet run_task(const CorpusSplit& test_split, std::span<const EmbeddingVector> test_embeddings,
                       const CandidatePool& pool, CompletionClient& client,
                       const RunOptions& options);

}  // namespace promptsel
