#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptsel/corpus.hpp"

namespace promptsel {

inline constexpr std::string_view kContextMarker = "Context:";
inline constexpr std::string_view kTaggedMarker = "Tagged:";

/// Where the model's labelling starts relative to the final "Tagged:".
enum class CompletionStart {
  same_line,  // "Tagged: tok_"
  new_line,   // "Tagged:\ntok_"
};

struct PromptFormat {
  CompletionStart completion_start = CompletionStart::same_line;
};

/// Order in which selected examples appear in the prompt.
enum class ExampleOrder { descending, ascending, shuffled };

ExampleOrder parse_example_order(std::string_view name);

/// Reorders ids that arrive best-first. `shuffled` is a seeded permutation.
std::vector<std::size_t> order_examples(std::vector<std::size_t> best_first, ExampleOrder order,
                                        std::uint64_t seed);

struct RenderedPrompt {
  std::string text;
  std::vector<std::size_t> example_ids;
  std::size_t test_id = 0;
  Task task = Task::ner;
};

/// Renders
///
///   Context: w1 w2 ...
///   Tagged: w1_L1 w2_L2 ...
///
/// for every example, followed by the test sentence's Context line and a
/// bare "Tagged:" with nothing after it. Throws Error(render) for an empty
/// example list or a token containing '_' or whitespace.
RenderedPrompt render_prompt(std::span<const TaggedSentence> examples, const TaggedSentence& test,
                             Task task);

/// Prefix that precedes the first token when decoding: " " or "\n".
std::string_view completion_lead(const PromptFormat& format) noexcept;

struct LabelViolation {
  std::size_t position = 0;
  std::string raw;
};

struct TaggedLine {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
  std::vector<LabelViolation> violations;
};

/// Splits whitespace-separated "token_LABEL" units at their last underscore.
/// Units without an underscore throw Error(format); labels outside the scheme
/// are replaced by the scheme's fallback label and recorded as violations.
TaggedLine parse_tagged_line(std::string_view line, const LabelScheme& scheme);

/// A prompt split back into its demonstrations and the test block.
struct ParsedPrompt {
  struct Example {
    std::vector<std::string> context;
    std::string tagged;  // raw text after "Tagged:"
  };
  std::vector<Example> examples;
  std::vector<std::string> test_context;
  /// Labelling in progress after the final "Tagged:", e.g. "EU_B-ORG rejects_".
  std::string test_progress;
};

/// Throws Error(format) if the text does not follow the Context/Tagged layout.
ParsedPrompt parse_prompt(std::string_view text);

}  // namespace promptsel
