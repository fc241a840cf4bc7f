#include "http_post.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <thread>

#include "promptsel/error.hpp"

namespace promptsel::detail {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::config, "endpoint '" + url + "' is not an absolute http(s) URL");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

std::string post_json(const std::string& url, const std::string& body, const PostOptions& options) {
  const auto target = split_url(url);
  httplib::Headers headers;
  for (const auto& [k, v] : options.headers) headers.emplace(k, v);

  auto backoff = options.initial_backoff;
  std::string last_failure;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      spdlog::debug("retrying POST {} after {} ms ({})", url, backoff.count(), last_failure);
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(target.origin);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_write_timeout(options.timeout);
    auto res = client.Post(target.path, headers, body, "application/json");
    if (!res) {
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    throw Error(ErrorKind::request,
                "POST " + url + " returned HTTP " + std::to_string(res->status) + ": " + excerpt(res->body));
  }
  throw Error(ErrorKind::transport, "POST " + url + " failed after " +
                                        std::to_string(options.max_retries + 1) +
                                        " attempts: " + last_failure);
}

}  // namespace promptsel::detail
