#include "promptsel/embedder.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "http_post.hpp"
#include "promptsel/error.hpp"
#include "promptsel/hashing.hpp"
#include "promptsel/parallel.hpp"

namespace promptsel {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::domain, "cosine similarity of vectors with dims " +
                                       std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) {
    throw Error(ErrorKind::domain, "cosine similarity of a zero-norm vector");
  }
  const double sim = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
  return std::clamp(sim, -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

EmbeddingVector hash_embed(std::span<const std::string> tokens, std::size_t dim,
                           std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorKind::domain, "hash embedding dimension must be at least 2");
  std::vector<double> values(dim, 0.0);
  const std::uint64_t salt = mix64(seed);
  for (const auto& token : tokens) {
    const std::uint64_t h = mix64(fnv1a64(token) ^ salt);
    values[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double v : values) norm += v * v;
  if (norm == 0.0) {
    // Every token cancelled out (or no tokens); fall back to a fixed unit axis.
    values[salt % dim] = 1.0;
    norm = 1.0;
  }
  norm = std::sqrt(norm);
  for (double& v : values) v /= norm;
  return {"hash-" + std::to_string(dim) + "-" + std::to_string(seed), std::move(values)};
}

EmbeddingVector hash_embed(const TaggedSentence& sentence, std::size_t dim, std::uint64_t seed) {
  return hash_embed(std::span<const std::string>(sentence.tokens), dim, seed);
}

HashEmbedder::HashEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ < 2) throw Error(ErrorKind::config, "hash embedding dimension must be at least 2");
}

std::string HashEmbedder::id() const {
  return "hash-" + std::to_string(dim_) + "-" + std::to_string(seed_);
}

std::vector<std::vector<double>> HashEmbedder::embed_texts(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find(' ', start);
      if (end == std::string::npos) end = text.size();
      if (end > start) tokens.emplace_back(text.substr(start, end - start));
      start = end + 1;
    }
    out.push_back(hash_embed(tokens, dim_, seed_).values);
  }
  return out;
}

VectorFileProvider::VectorFileProvider(std::string provider_id, const std::string& path)
    : id_(std::move(provider_id)) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::retrieval, "cannot open vector file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      auto values = j.at("values").get<std::vector<double>>();
      if (dim_ == 0) dim_ = values.size();
      if (values.size() != dim_) {
        throw Error(ErrorKind::integrity, path + ":" + std::to_string(line_no) +
                                              ": vector of dim " + std::to_string(values.size()) +
                                              ", expected " + std::to_string(dim_));
      }
      vectors_.emplace(j.at("text").get<std::string>(), std::move(values));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<std::vector<double>> VectorFileProvider::embed_texts(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto it = vectors_.find(text);
    if (it == vectors_.end()) {
      throw Error(ErrorKind::retrieval, "no exported vector for \"" + text + "\"");
    }
    out.push_back(it->second);
  }
  return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingOptions options)
    : options_(std::move(options)) {
  if (options_.url.empty()) throw Error(ErrorKind::config, "embedding endpoint URL is not set");
  if (options_.dim == 0) throw Error(ErrorKind::config, "embedding dimension must be positive");
}

std::vector<std::vector<double>> RemoteEmbeddingProvider::embed_texts(
    std::span<const std::string> texts) {
  detail::PostOptions post;
  post.max_retries = options_.max_retries;
  post.initial_backoff = options_.initial_backoff;
  post.timeout = options_.timeout;
  if (!options_.auth_token.empty()) {
    post.headers.emplace_back("Authorization", "Bearer " + options_.auth_token);
  }
  nlohmann::json request{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const std::string body = detail::post_json(options_.url, request.dump(), post);
  try {
    auto vectors = nlohmann::json::parse(body).at("vectors").get<std::vector<std::vector<double>>>();
    if (vectors.size() != texts.size()) {
      throw Error(ErrorKind::integrity, "endpoint returned " + std::to_string(vectors.size()) +
                                            " vectors for " + std::to_string(texts.size()) + " texts");
    }
    return vectors;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::integrity, std::string("malformed embedding response: ") + e.what());
  }
}

std::string embedding_key(std::string_view text) { return sha256_hex(text); }

EmbeddingCache::EmbeddingCache(std::string path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        EmbeddingVector vec{j.at("provider").get<std::string>(),
                            j.at("values").get<std::vector<double>>()};
        if (vec.dim() != j.at("dim").get<std::size_t>()) {
          throw Error(ErrorKind::integrity, path_ + ":" + std::to_string(line_no) +
                                                ": dim field disagrees with values");
        }
        entries_.insert_or_assign(slot(vec.provider_id, j.at("key").get<std::string>()),
                                  std::move(vec));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::integrity,
                    path_ + ":" + std::to_string(line_no) + ": corrupt cache record: " + e.what());
      }
    }
  }
  sink_.open(path_, std::ios::app);
  if (!sink_) throw Error(ErrorKind::integrity, "cannot write embedding cache '" + path_ + "'");
}

std::string EmbeddingCache::slot(std::string_view provider_id, std::string_view key) {
  std::string s(provider_id);
  s.push_back('\n');
  s += key;
  return s;
}

std::optional<EmbeddingVector> EmbeddingCache::find(std::string_view provider_id,
                                                    std::string_view key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(slot(provider_id, key));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::store(std::string_view key, const EmbeddingVector& vec) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.try_emplace(slot(vec.provider_id, key), vec);
  if (!inserted) return;
  if (sink_.is_open()) {
    nlohmann::json j{{"key", key}, {"provider", vec.provider_id}, {"dim", vec.dim()},
                     {"values", vec.values}};
    sink_ << j.dump() << '\n';
    sink_.flush();
  }
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

Embedder::Embedder(EmbeddingProvider& provider, EmbeddingCache& cache, std::size_t max_in_flight)
    : provider_(provider), cache_(cache), max_in_flight_(std::max<std::size_t>(1, max_in_flight)) {}

EmbeddingVector Embedder::checked(std::vector<double> values, std::string_view what) const {
  if (values.size() != provider_.dim()) {
    throw Error(ErrorKind::integrity, std::string(what) + ": provider '" + provider_.id() +
                                          "' returned dim " + std::to_string(values.size()) +
                                          ", declared " + std::to_string(provider_.dim()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::integrity, std::string(what) + ": non-finite embedding value");
    }
  }
  return {provider_.id(), std::move(values)};
}

EmbeddingVector Embedder::embed(const TaggedSentence& sentence) {
  const std::string text = sentence.text();
  const std::string key = embedding_key(text);
  if (auto hit = cache_.find(provider_.id(), key)) {
    std::lock_guard lock(stats_mutex_);
    ++stats_.hits;
    return *hit;
  }
  std::vector<std::vector<double>> result;
  try {
    result = provider_.embed_texts(std::span<const std::string>(&text, 1));
  } catch (const std::exception& e) {
    throw Error(ErrorKind::retrieval, "sentence " + std::to_string(sentence.id) +
                                          ": embedding unavailable: " + e.what());
  }
  if (result.size() != 1) {
    throw Error(ErrorKind::integrity, "provider returned " + std::to_string(result.size()) +
                                          " vectors for one text");
  }
  auto vec = checked(std::move(result.front()), "sentence " + std::to_string(sentence.id));
  cache_.store(key, vec);
  {
    std::lock_guard lock(stats_mutex_);
    ++stats_.misses;
    ++stats_.provider_calls;
  }
  return vec;
}

std::vector<EmbeddingVector> Embedder::embed_all(const CorpusSplit& split) {
  const auto sentences = split.sentences();
  std::vector<std::string> keys(sentences.size());
  std::vector<std::optional<EmbeddingVector>> out(sentences.size());

  // Unique missing texts, each remembering the first sentence that needs it.
  std::vector<std::string> missing_texts;
  std::vector<std::size_t> missing_owner;
  std::unordered_map<std::string, std::size_t> missing_index;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::string text = sentences[i].text();
    keys[i] = embedding_key(text);
    if (auto hit = cache_.find(provider_.id(), keys[i])) {
      out[i] = std::move(*hit);
      ++hits;
    } else if (missing_index.try_emplace(keys[i], missing_texts.size()).second) {
      missing_texts.push_back(std::move(text));
      missing_owner.push_back(i);
    }
  }

  const std::size_t batch = std::max<std::size_t>(1, provider_.max_batch());
  const std::size_t n_batches = (missing_texts.size() + batch - 1) / batch;
  parallel_for(n_batches, max_in_flight_, [&](std::size_t b) {
    const std::size_t lo = b * batch;
    const std::size_t hi = std::min(missing_texts.size(), lo + batch);
    std::span<const std::string> texts(missing_texts.data() + lo, hi - lo);
    std::vector<std::vector<double>> vectors;
    try {
      vectors = provider_.embed_texts(texts);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::retrieval, "sentence " + std::to_string(sentences[missing_owner[lo]].id) +
                                            ": embedding unavailable: " + e.what());
    }
    if (vectors.size() != texts.size()) {
      throw Error(ErrorKind::integrity, "provider returned " + std::to_string(vectors.size()) +
                                            " vectors for " + std::to_string(texts.size()) + " texts");
    }
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      const std::size_t owner = missing_owner[lo + k];
      cache_.store(keys[owner],
                   checked(std::move(vectors[k]), "sentence " + std::to_string(sentences[owner].id)));
    }
  });

  std::vector<EmbeddingVector> result;
  result.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (!out[i]) out[i] = cache_.find(provider_.id(), keys[i]);
    if (!out[i]) {
      throw Error(ErrorKind::retrieval, "sentence " + std::to_string(sentences[i].id) +
                                            ": embedding missing after fill");
    }
    result.push_back(std::move(*out[i]));
  }
  {
    std::lock_guard lock(stats_mutex_);
    stats_.hits += hits;
    stats_.misses += sentences.size() - hits;
    stats_.provider_calls += n_batches;
  }
  return result;
}

EmbedStats Embedder::stats() const {
  std::lock_guard lock(stats_mutex_);
  return stats_;
}

}  // namespace promptsel
