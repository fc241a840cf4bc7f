#include "promptsel/prompting.hpp"

#include <algorithm>
#include <cctype>

#include "promptsel/error.hpp"
#include "promptsel/hashing.hpp"

namespace promptsel {

ExampleOrder parse_example_order(std::string_view name) {
  if (name == "descending") return ExampleOrder::descending;
  if (name == "ascending") return ExampleOrder::ascending;
  if (name == "shuffled") return ExampleOrder::shuffled;
  throw Error(ErrorKind::config, "unknown example order '" + std::string(name) + "'");
}

std::vector<std::size_t> order_examples(std::vector<std::size_t> best_first, ExampleOrder order,
                                        std::uint64_t seed) {
  switch (order) {
    case ExampleOrder::descending:
      break;
    case ExampleOrder::ascending:
      std::reverse(best_first.begin(), best_first.end());
      break;
    case ExampleOrder::shuffled: {
      SplitMix64 rng(seed);
      for (std::size_t i = best_first.size(); i > 1; --i) {
        std::swap(best_first[i - 1], best_first[rng.below(i)]);
      }
      break;
    }
  }
  return best_first;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

void check_renderable(const TaggedSentence& s) {
  for (const auto& token : s.tokens) {
    if (token.empty() || token.find('_') != std::string::npos ||
        std::any_of(token.begin(), token.end(), is_space)) {
      throw Error(ErrorKind::render, "sentence " + std::to_string(s.id) + ": token '" + token +
                                         "' cannot be rendered in a prompt");
    }
  }
}

void append_context(std::string& out, const TaggedSentence& s) {
  out += kContextMarker;
  for (const auto& token : s.tokens) {
    out.push_back(' ');
    out += token;
  }
  out.push_back('\n');
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

RenderedPrompt render_prompt(std::span<const TaggedSentence> examples, const TaggedSentence& test,
                             Task task) {
  if (examples.empty()) throw Error(ErrorKind::render, "a prompt needs at least one example");
  RenderedPrompt prompt;
  prompt.task = task;
  prompt.test_id = test.id;
  std::string& out = prompt.text;
  for (const auto& ex : examples) {
    check_renderable(ex);
    append_context(out, ex);
    out += kTaggedMarker;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      out.push_back(' ');
      out += ex.tokens[i];
      out.push_back('_');
      out += ex.labels[i];
    }
    out.push_back('\n');
    prompt.example_ids.push_back(ex.id);
  }
  check_renderable(test);
  append_context(out, test);
  out += kTaggedMarker;
  return prompt;
}

std::string_view completion_lead(const PromptFormat& format) noexcept {
  return format.completion_start == CompletionStart::new_line ? "\n" : " ";
}

TaggedLine parse_tagged_line(std::string_view line, const LabelScheme& scheme) {
  TaggedLine out;
  for (std::string_view unit : split_ws(line)) {
    const auto cut = unit.rfind('_');
    if (cut == std::string_view::npos) {
      throw Error(ErrorKind::format, "unit '" + std::string(unit) + "' has no '_' delimiter");
    }
    std::string label(unit.substr(cut + 1));
    if (!scheme.contains(label)) {
      out.violations.push_back({out.labels.size(), label});
      label = scheme.fallback_label();
    }
    out.tokens.emplace_back(unit.substr(0, cut));
    out.labels.push_back(std::move(label));
  }
  return out;
}

ParsedPrompt parse_prompt(std::string_view text) {
  ParsedPrompt parsed;
  std::optional<std::vector<std::string>> pending_context;
  std::size_t start = 0;
  bool saw_final_tagged = false;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    const bool last_line = end == std::string_view::npos;
    if (last_line) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;

    if (line.starts_with(kContextMarker)) {
      if (pending_context) throw Error(ErrorKind::format, "two Context lines without a Tagged line");
      pending_context.emplace();
      for (auto tok : split_ws(line.substr(kContextMarker.size()))) pending_context->emplace_back(tok);
    } else if (line.starts_with(kTaggedMarker)) {
      if (!pending_context) throw Error(ErrorKind::format, "Tagged line without a Context line");
      std::string_view rest = line.substr(kTaggedMarker.size());
      if (last_line) {
        parsed.test_context = std::move(*pending_context);
        parsed.test_progress = std::string(rest);
        saw_final_tagged = true;
      } else if (rest.empty() && text.substr(start).find('\n') == std::string_view::npos) {
        // "Tagged:" then in-progress labelling on one more line. An example's
        // Tagged line is always followed by at least two more lines.
        parsed.test_context = std::move(*pending_context);
        std::string progress(rest);
        progress.push_back('\n');
        progress += text.substr(start);
        parsed.test_progress = std::move(progress);
        saw_final_tagged = true;
        break;
      } else {
        parsed.examples.push_back({std::move(*pending_context), std::string(rest)});
      }
      pending_context.reset();
    } else if (!line.empty()) {
      throw Error(ErrorKind::format, "unexpected prompt line '" + std::string(line) + "'");
    }
    if (last_line) break;
  }
  if (!saw_final_tagged) throw Error(ErrorKind::format, "prompt does not end with a Tagged block");
  return parsed;
}

}  // namespace promptsel
