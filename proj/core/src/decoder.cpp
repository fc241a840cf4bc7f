#include "promptsel/decoder.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>

#include "promptsel/error.hpp"
#include "promptsel/hashing.hpp"
#include "promptsel/parallel.hpp"

namespace promptsel {

std::string_view to_string(RepairKind kind) noexcept {
  switch (kind) {
    case RepairKind::exact: return "exact";
    case RepairKind::case_insensitive: return "case_insensitive";
    case RepairKind::prefix: return "prefix";
    case RepairKind::fallback: return "fallback";
  }
  return "?";
}

namespace {

char fold(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

std::size_t folded_common_prefix(std::string_view a, std::string_view b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && fold(a[n]) == fold(b[n])) ++n;
  return n;
}

std::string first_unit(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t j = i;
  while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
  return std::string(text.substr(i, j - i));
}

}  // namespace

RepairedLabel repair_label(std::string_view raw, const LabelScheme& scheme) {
  if (scheme.contains(raw)) return {std::string(raw), RepairKind::exact};
  for (const auto& label : scheme.labels()) {
    if (label.size() == raw.size() && folded_common_prefix(label, raw) == raw.size()) {
      return {label, RepairKind::case_insensitive};
    }
  }
  std::size_t best = 0;
  const std::string* winner = nullptr;
  bool tied = false;
  for (const auto& label : scheme.labels()) {
    const std::size_t n = folded_common_prefix(label, raw);
    if (n > best) {
      best = n;
      winner = &label;
      tied = false;
    } else if (n == best && n > 0) {
      tied = true;
    }
  }
  if (winner && !tied) return {*winner, RepairKind::prefix};
  return {scheme.fallback_label(), RepairKind::fallback};
}

DecodedSentence decode_sentence(const RenderedPrompt& prompt, const TaggedSentence& test,
                                CompletionClient& client, const LabelScheme& scheme,
                                const DecodeOptions& options) {
  DecodedSentence out;
  out.labels.reserve(test.size());
  CompletionRequest req;
  req.prompt = prompt.text;
  req.max_tokens = options.max_tokens;
  req.stop = options.stop;
  req.temperature = options.temperature;
  for (std::size_t i = 0; i < test.size(); ++i) {
    req.prompt += i == 0 ? completion_lead(options.format) : std::string_view(" ");
    req.prompt += test.tokens[i];
    req.prompt.push_back('_');
    const auto res = client.complete(req);
    const std::string raw = first_unit(res.text);
    auto repaired = repair_label(raw, scheme);
    if (repaired.kind != RepairKind::exact) {
      spdlog::debug("test {} token {}: '{}' -> '{}' ({})", test.id, i, raw, repaired.label,
                    to_string(repaired.kind));
      out.repairs.push_back({i, raw, repaired.label, repaired.kind});
    }
    req.prompt += repaired.label;
    out.labels.push_back(std::move(repaired.label));
  }
  return out;
}

Strategy parse_strategy(std::string_view name) {
  if (name == "cp") return Strategy::cp;
  if (name == "knn") return Strategy::knn;
  if (name == "static") return Strategy::static_examples;
  throw Error(ErrorKind::config, "unknown strategy '" + std::string(name) + "' (expected cp, knn or static)");
}

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::cp: return "cp";
    case Strategy::knn: return "knn";
    case Strategy::static_examples: return "static";
  }
  return "?";
}

const Prediction* PredictionSet::find(std::size_t test_id) const {
  auto it = std::lower_bound(predictions.begin(), predictions.end(), test_id,
                             [](const Prediction& p, std::size_t id) { return p.test_id < id; });
  return it != predictions.end() && it->test_id == test_id ? &*it : nullptr;
}

std::vector<std::size_t> select_examples(const TaggedSentence& test,
                                         const EmbeddingVector* test_embedding,
                                         const CandidatePool& pool, const RunOptions& options) {
  const auto& cfg = options.selection;
  switch (options.strategy) {
    case Strategy::static_examples:
      return options.static_ids;
    case Strategy::knn:
      if (!test_embedding) throw Error(ErrorKind::retrieval, "knn selection needs a test embedding");
      return select_nearest(pool, *test_embedding, cfg.k, cfg.exclude_duplicates ? &test : nullptr);
    case Strategy::cp: {
      if (!test_embedding) throw Error(ErrorKind::retrieval, "cp selection needs a test embedding");
      const auto scores = pool.score(test, *test_embedding, cfg);
      return select_top_k(scores, cfg.k);
    }
  }
  return {};
}

PredictionSet run_task(const CorpusSplit& test_split, std::span<const EmbeddingVector> test_embeddings,
                       const CandidatePool& pool, CompletionClient& client,
                       const RunOptions& options) {
  options.selection.validate();
  if (options.strategy == Strategy::static_examples) {
    if (options.static_ids.empty()) throw Error(ErrorKind::config, "static strategy needs example ids");
    for (std::size_t id : options.static_ids) {
      if (id >= pool.size()) {
        throw Error(ErrorKind::config, "static example id " + std::to_string(id) + " is outside the pool");
      }
    }
  } else if (test_embeddings.size() != test_split.size()) {
    throw Error(ErrorKind::retrieval, "test embeddings are missing for " +
                                          std::string(to_string(options.strategy)) + " selection");
  }

  const auto& scheme = test_split.scheme();
  const auto tests = test_split.sentences();
  std::vector<std::optional<Prediction>> done(tests.size());
  std::vector<std::optional<SentenceFailure>> failed(tests.size());
  std::vector<std::optional<RenderedPrompt>> prompts(tests.size());

  parallel_for(tests.size(), options.jobs, [&](std::size_t i) {
    const auto& test = tests[i];
    std::string hash;
    try {
      const EmbeddingVector* emb = test_embeddings.empty() ? nullptr : &test_embeddings[i];
      auto ids = order_examples(select_examples(test, emb, pool, options), options.order,
                                mix64(options.seed) ^ test.id);
      std::vector<TaggedSentence> examples;
      examples.reserve(ids.size());
      for (std::size_t id : ids) examples.push_back(pool.split()[id]);
      auto prompt = render_prompt(examples, test, scheme.task());
      hash = sha256_hex(prompt.text);

      const Prediction* previous = options.resume ? options.resume->find(test.id) : nullptr;
      if (previous && previous->prompt_hash == hash && previous->predicted.size() == test.size()) {
        done[i] = *previous;
      } else {
        auto decoded = decode_sentence(prompt, test, client, scheme, options.decode);
        done[i] = Prediction{test.id, test.tokens, test.labels, std::move(decoded.labels), ids,
                             hash, std::move(decoded.repairs)};
      }
      if (options.on_prompt) prompts[i] = std::move(prompt);
    } catch (const std::exception& e) {
      failed[i] = SentenceFailure{test.id, hash, e.what()};
    }
  });

  PredictionSet set;
  set.task = scheme.task();
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (done[i]) set.predictions.push_back(std::move(*done[i]));
    if (failed[i]) {
      spdlog::warn("test sentence {} skipped: {}", failed[i]->test_id, failed[i]->message);
      set.failures.push_back(std::move(*failed[i]));
    }
    if (prompts[i] && options.on_prompt) options.on_prompt(*prompts[i]);
  }
  return set;
}

}  // namespace promptsel
