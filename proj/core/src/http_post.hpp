#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace promptsel::detail {

struct PostOptions {
  std::vector<std::pair<std::string, std::string>> headers;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::seconds timeout{30};
};

/// POSTs a JSON body to `url` and returns the response body. Connection
/// failures, 429 and 5xx are retried with exponential backoff; when retries
/// are exhausted Error(transport) is thrown. Other 4xx responses throw
/// Error(request) carrying an excerpt of the body.
std::string post_json(const std::string& url, const std::string& body, const PostOptions& options);

}  // namespace promptsel::detail
