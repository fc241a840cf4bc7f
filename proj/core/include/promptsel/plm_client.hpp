#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <fstream>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "promptsel/corpus.hpp"

namespace promptsel {

struct CompletionRequest {
  std::string prompt;
  int max_tokens = 8;
  std::vector<std::string> stop;
  double temperature = 0.0;
};

struct CompletionResponse {
  std::string text;
  std::string finish_reason = "stop";
};

/// Canonical JSON body of a request; the remote protocol and the replay
/// fixture key both derive from it.
std::string request_json(const CompletionRequest& req);
/// Hex SHA-256 of request_json().
std::string request_hash(const CompletionRequest& req);

/// Completion endpoint abstraction. Implementations must be safe to call
/// from several decoding threads at once.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual CompletionResponse complete(const CompletionRequest& req) = 0;
};

/// At most `max_tokens` whitespace-delimited units of `text`.
std::string truncate_units(std::string_view text, int max_tokens);

/// Sliding-window budget: at most `requests` acquisitions per `interval`.
class RateLimiter {
 public:
  RateLimiter(std::size_t requests, std::chrono::milliseconds interval);

  /// Blocks until a slot is free. A zero budget disables limiting.
  void acquire();

 private:
  std::size_t requests_;
  std::chrono::milliseconds interval_;
  std::mutex mutex_;
  std::deque<std::chrono::steady_clock::time_point> recent_;
};

struct HttpClientOptions {
  std::string url;
  std::string api_key;  // "Authorization: Bearer <key>" when non-empty
  std::string model;    // forwarded as "model" when non-empty
  /// Send {"messages":[{"role":"user","content":prompt}]} instead of
  /// {"prompt": ...} for chat-style endpoints.
  bool chat_wrap = false;
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};
  std::size_t requests_per_interval = 0;  // 0: unlimited
  std::chrono::milliseconds interval{60000};
};

/// POST {"prompt","max_tokens","temperature","stop"} -> {"text","finish_reason"}.
/// OpenAI-shaped {"choices":[{"text"|"message":{"content"}}]} replies are
/// also accepted.
class HttpCompletionClient final : public CompletionClient {
 public:
  explicit HttpCompletionClient(HttpClientOptions options);
  CompletionResponse complete(const CompletionRequest& req) override;

 private:
  HttpClientOptions options_;
  RateLimiter limiter_;
};

/// Answers with the gold label of the next unlabelled test token. With
/// noise > 0 the label is replaced, with that probability, by a uniformly
/// drawn wrong label. The draw is seeded per prompt, so answers do not depend
/// on call order.
class OracleClient final : public CompletionClient {
 public:
  OracleClient(const CorpusSplit& gold, double noise = 0.0, std::uint64_t seed = 0);
  CompletionResponse complete(const CompletionRequest& req) override;

 private:
  const CorpusSplit& gold_;
  double noise_;
  std::uint64_t seed_;
  std::unordered_map<std::string, std::size_t> by_text_;
};

/// In-context lookup model: labels a token with the label it carries in the
/// prompt's demonstrations (most frequent, then first seen), or the scheme's
/// fallback when the token never appears. Selection quality therefore shows
/// up directly in its output.
class DemonstrationLookupClient final : public CompletionClient {
 public:
  explicit DemonstrationLookupClient(LabelScheme scheme);
  CompletionResponse complete(const CompletionRequest& req) override;

 private:
  LabelScheme scheme_;
};

/// Forwards to `inner` and appends {"request_hash","response"} records to a
/// JSON-lines fixture.
class RecordingClient final : public CompletionClient {
 public:
  RecordingClient(CompletionClient& inner, const std::string& fixture_path);
  CompletionResponse complete(const CompletionRequest& req) override;

 private:
  CompletionClient& inner_;
  std::mutex mutex_;
  std::ofstream sink_;
};

/// Serves responses from a fixture written by RecordingClient; unknown
/// requests throw Error(transport).
class ReplayClient final : public CompletionClient {
 public:
  explicit ReplayClient(const std::string& fixture_path);
  CompletionResponse complete(const CompletionRequest& req) override;
  std::size_t size() const noexcept { return responses_.size(); }

 private:
  std::unordered_map<std::string, CompletionResponse> responses_;
};

}  // namespace promptsel
