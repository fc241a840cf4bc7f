#include "support/http_fixture.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <promptsel/embedder.hpp>
#include <stdexcept>

namespace testing_support {

LocalServer::LocalServer(promptsel::CompletionClient& backend, std::size_t embed_dim)
    : backend_(backend), embed_dim_(embed_dim), server_(std::make_unique<httplib::Server>()) {
  auto gate = [this](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(auth_mutex_);
      last_auth_ = req.get_header_value("Authorization");
    }
    if (fail_remaining_.load() > 0) {
      --fail_remaining_;
      res.status = fail_status_.load();
      res.set_content("{\"error\":\"injected\"}", "application/json");
      return false;
    }
    return true;
  };

  server_->Post("/complete", [this, gate](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    if (!gate(req, res)) return;
    const auto body = nlohmann::json::parse(req.body);
    promptsel::CompletionRequest creq;
    creq.prompt = body.at("prompt").get<std::string>();
    creq.max_tokens = body.at("max_tokens").get<int>();
    creq.temperature = body.at("temperature").get<double>();
    creq.stop = body.at("stop").get<std::vector<std::string>>();
    const auto out = backend_.complete(creq);
    res.set_content(nlohmann::json{{"text", out.text}, {"finish_reason", out.finish_reason}}.dump(),
                    "application/json");
  });

  server_->Post("/v1/chat/completions", [this, gate](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    if (!gate(req, res)) return;
    const auto body = nlohmann::json::parse(req.body);
    promptsel::CompletionRequest creq;
    creq.prompt = body.at("messages").at(0).at("content").get<std::string>();
    creq.max_tokens = body.at("max_tokens").get<int>();
    creq.temperature = body.at("temperature").get<double>();
    creq.stop = body.at("stop").get<std::vector<std::string>>();
    const auto out = backend_.complete(creq);
    nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", out.text}}},
                                       {"finish_reason", out.finish_reason}}}}};
    res.set_content(reply.dump(), "application/json");
  });

  server_->Post("/embed", [this, gate](const httplib::Request& req, httplib::Response& res) {
    ++embed_requests_;
    if (!gate(req, res)) return;
    const auto body = nlohmann::json::parse(req.body);
    promptsel::HashEmbedder embedder(embed_dim_, 7);
    const auto texts = body.at("texts").get<std::vector<std::string>>();
    res.set_content(nlohmann::json{{"vectors", embedder.embed_texts(texts)}}.dump(), "application/json");
  });

  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("test server could not bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

LocalServer::~LocalServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string LocalServer::url(const std::string& path) const {
  return "http://127.0.0.1:" + std::to_string(port_) + path;
}

std::string LocalServer::last_authorization() const {
  std::lock_guard lock(auth_mutex_);
  return last_auth_;
}

}  // namespace testing_support
