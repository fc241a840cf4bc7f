#include "promptsel/plm_client.hpp"

#include <spdlog/spdlog.h>

#include <cctype>
#include <map>
#include <nlohmann/json.hpp>
#include <thread>

#include "http_post.hpp"
#include "promptsel/error.hpp"
#include "promptsel/hashing.hpp"
#include "promptsel/prompting.hpp"

namespace promptsel {

std::string request_json(const CompletionRequest& req) {
  nlohmann::json j{{"prompt", req.prompt},
                   {"max_tokens", req.max_tokens},
                   {"temperature", req.temperature},
                   {"stop", req.stop}};
  return j.dump();
}

std::string request_hash(const CompletionRequest& req) { return sha256_hex(request_json(req)); }

std::string truncate_units(std::string_view text, int max_tokens) {
  std::string out;
  int units = 0;
  std::size_t i = 0;
  while (i < text.size() && units < max_tokens) {
    std::size_t start = i;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) {
      out.append(text.substr(start, i - start));
      ++units;
    }
  }
  return out;
}

RateLimiter::RateLimiter(std::size_t requests, std::chrono::milliseconds interval)
    : requests_(requests), interval_(interval) {}

void RateLimiter::acquire() {
  if (requests_ == 0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    while (!recent_.empty() && now - recent_.front() >= interval_) recent_.pop_front();
    if (recent_.size() < requests_) {
      recent_.push_back(now);
      return;
    }
    const auto wait = recent_.front() + interval_ - now;
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

HttpCompletionClient::HttpCompletionClient(HttpClientOptions options)
    : options_(std::move(options)), limiter_(options_.requests_per_interval, options_.interval) {
  if (options_.url.empty()) throw Error(ErrorKind::config, "completion endpoint URL is not set");
}

CompletionResponse HttpCompletionClient::complete(const CompletionRequest& req) {
  nlohmann::json body = nlohmann::json::parse(request_json(req));
  if (options_.chat_wrap) {
    body.erase("prompt");
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}});
  }
  if (!options_.model.empty()) body["model"] = options_.model;

  detail::PostOptions post;
  post.max_retries = options_.max_retries;
  post.initial_backoff = options_.initial_backoff;
  post.timeout = options_.timeout;
  if (!options_.api_key.empty()) post.headers.emplace_back("Authorization", "Bearer " + options_.api_key);

  limiter_.acquire();
  const std::string reply = detail::post_json(options_.url, body.dump(), post);
  try {
    const auto j = nlohmann::json::parse(reply);
    CompletionResponse res;
    if (j.contains("text")) {
      res.text = j.at("text").get<std::string>();
      res.finish_reason = j.value("finish_reason", std::string("stop"));
    } else {
      const auto& choice = j.at("choices").at(0);
      res.text = choice.contains("message") ? choice.at("message").at("content").get<std::string>()
                                            : choice.at("text").get<std::string>();
      const auto& reason = choice.value("finish_reason", nlohmann::json("stop"));
      res.finish_reason = reason.is_string() ? reason.get<std::string>() : "stop";
    }
    return res;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::transport, std::string("malformed completion response: ") + e.what());
  }
}

namespace {

// Index of the token being labelled: the prompt must end in "<token>_".
std::size_t pending_position(const ParsedPrompt& parsed) {
  std::vector<std::string> units;
  std::size_t i = 0;
  const std::string& p = parsed.test_progress;
  while (i < p.size()) {
    while (i < p.size() && std::isspace(static_cast<unsigned char>(p[i]))) ++i;
    std::size_t j = i;
    while (j < p.size() && !std::isspace(static_cast<unsigned char>(p[j]))) ++j;
    if (j > i) units.push_back(p.substr(i, j - i));
    i = j;
  }
  if (units.empty() || units.back().back() != '_') {
    throw Error(ErrorKind::oracle, "prompt does not end with a token awaiting its label");
  }
  const std::size_t pos = units.size() - 1;
  if (pos >= parsed.test_context.size() ||
      units.back() != parsed.test_context[pos] + "_") {
    throw Error(ErrorKind::oracle, "pending token '" + units.back() +
                                       "' does not match the test sentence");
  }
  return pos;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

ParsedPrompt parse_for_mock(const std::string& prompt) {
  try {
    return parse_prompt(prompt);
  } catch (const Error& e) {
    throw Error(ErrorKind::oracle, std::string("unparseable prompt: ") + e.what());
  }
}

}  // namespace

OracleClient::OracleClient(const CorpusSplit& gold, double noise, std::uint64_t seed)
    : gold_(gold), noise_(noise), seed_(seed) {
  if (!(noise_ >= 0.0 && noise_ <= 1.0)) throw Error(ErrorKind::config, "oracle noise must be in [0, 1]");
  for (const auto& s : gold_.sentences()) by_text_.try_emplace(s.text(), s.id);
}

CompletionResponse OracleClient::complete(const CompletionRequest& req) {
  const auto parsed = parse_for_mock(req.prompt);
  auto it = by_text_.find(join(parsed.test_context));
  if (it == by_text_.end()) throw Error(ErrorKind::oracle, "test sentence is not in the gold split");
  const std::size_t pos = pending_position(parsed);
  const auto& scheme = gold_.scheme();
  std::string label = gold_[it->second].labels[pos];
  if (noise_ > 0.0 && scheme.size() > 1) {
    SplitMix64 rng(mix64(seed_) ^ fnv1a64(req.prompt));
    if (rng.unit() < noise_) {
      const std::size_t gold_idx = *scheme.index_of(label);
      std::size_t idx = rng.below(scheme.size() - 1);
      if (idx >= gold_idx) ++idx;
      label = scheme.labels()[idx];
    }
  }
  return {truncate_units(label, req.max_tokens), "stop"};
}

DemonstrationLookupClient::DemonstrationLookupClient(LabelScheme scheme) : scheme_(std::move(scheme)) {}

CompletionResponse DemonstrationLookupClient::complete(const CompletionRequest& req) {
  const auto parsed = parse_for_mock(req.prompt);
  const std::size_t pos = pending_position(parsed);
  const std::string& token = parsed.test_context[pos];

  // label -> (count, first position seen)
  std::map<std::string, std::pair<std::size_t, std::size_t>> seen;
  std::size_t order = 0;
  for (const auto& ex : parsed.examples) {
    const auto line = parse_tagged_line(ex.tagged, scheme_);
    for (std::size_t i = 0; i < line.tokens.size(); ++i, ++order) {
      if (line.tokens[i] != token) continue;
      auto [slot, fresh] = seen.try_emplace(line.labels[i], 0, order);
      ++slot->second.first;
    }
  }
  std::string label = scheme_.fallback_label();
  std::pair<std::size_t, std::size_t> best{0, 0};
  for (const auto& [candidate, stat] : seen) {
    if (stat.first > best.first || (stat.first == best.first && stat.second < best.second)) {
      best = stat;
      label = candidate;
    }
  }
  return {truncate_units(label, req.max_tokens), "stop"};
}

RecordingClient::RecordingClient(CompletionClient& inner, const std::string& fixture_path)
    : inner_(inner), sink_(fixture_path, std::ios::app) {
  if (!sink_) throw Error(ErrorKind::config, "cannot write fixture '" + fixture_path + "'");
}

CompletionResponse RecordingClient::complete(const CompletionRequest& req) {
  auto res = inner_.complete(req);
  nlohmann::json record{{"request_hash", request_hash(req)},
                        {"response", {{"text", res.text}, {"finish_reason", res.finish_reason}}}};
  std::lock_guard lock(mutex_);
  sink_ << record.dump() << '\n';
  sink_.flush();
  return res;
}

ReplayClient::ReplayClient(const std::string& fixture_path) {
  std::ifstream in(fixture_path);
  if (!in) throw Error(ErrorKind::config, "cannot open fixture '" + fixture_path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto& r = j.at("response");
      responses_.insert_or_assign(j.at("request_hash").get<std::string>(),
                                  CompletionResponse{r.at("text").get<std::string>(),
                                                     r.at("finish_reason").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse, fixture_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

CompletionResponse ReplayClient::complete(const CompletionRequest& req) {
  const auto it = responses_.find(request_hash(req));
  if (it == responses_.end()) {
    throw Error(ErrorKind::transport, "request " + request_hash(req).substr(0, 12) +
                                          " is not in the replay fixture");
  }
  return it->second;
}

}  // namespace promptsel
