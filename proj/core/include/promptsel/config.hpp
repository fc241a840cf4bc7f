#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptsel {

/// TOML configuration flattened to dotted keys:
///
///   task = "ner"
///   k = 5
///   weights = [0.25, 0.25, 0.5]   # stored as "0.25, 0.25, 0.5"
///   [embedder]
///   provider = "hash"             # stored as "embedder.provider"
///
/// Values keep a textual form; typed getters convert on access and throw
/// Error(config) naming the key on failure.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::string& path);

  bool contains(std::string_view key) const;
  void set(std::string key, std::string value);

  std::optional<std::string> get(std::string_view key) const;
  std::string get_string(std::string_view key, std::string_view fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::size_t get_size(std::string_view key, std::size_t fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  std::vector<std::string> get_list(std::string_view key) const;

  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

/// "a, b ,c" or "[a, b, c]" -> {"a","b","c"}; quotes around items are removed.
std::vector<std::string> split_list(std::string_view text);

double parse_double(std::string_view text, std::string_view what);
std::size_t parse_size(std::string_view text, std::string_view what);

}  // namespace promptsel
