#include "promptsel/config.hpp"

#include <toml.hpp>

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "promptsel/corpus.hpp"
#include "promptsel/error.hpp"

namespace promptsel {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

std::string scalar_text(const toml::node& node, const std::string& key) {
  if (auto s = node.value<std::string>()) return *s;
  if (node.is_boolean()) return *node.value<bool>() ? "true" : "false";
  if (node.is_integer()) return std::to_string(*node.value<std::int64_t>());
  if (node.is_floating_point()) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *node.value<double>());
    return std::string(buf, ptr);
  }
  throw Error(ErrorKind::config, "config key '" + key + "': unsupported value type");
}

void flatten(const toml::table& table, const std::string& prefix,
             std::map<std::string, std::string, std::less<>>& out) {
  for (const auto& [k, node] : table) {
    const std::string key = prefix + std::string(k.str());
    if (const auto* sub = node.as_table()) {
      flatten(*sub, key + ".", out);
    } else if (const auto* array = node.as_array()) {
      std::string joined;
      for (const auto& item : *array) {
        if (!joined.empty()) joined += ", ";
        joined += scalar_text(item, key);
      }
      out.insert_or_assign(key, std::move(joined));
    } else {
      out.insert_or_assign(key, scalar_text(node, key));
    }
  }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  try {
    flatten(toml::parse(text), "", cfg.entries_);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorKind::config, "config line " + std::to_string(e.source().begin.line) + ": " +
                                       std::string(e.description()));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    throw Error(ErrorKind::config, path + ": " + e.what());
  }
}

bool KeyValueConfig::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

void KeyValueConfig::set(std::string key, std::string value) {
  entries_.insert_or_assign(std::move(key), std::move(value));
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(std::string_view key, std::string_view fallback) const {
  auto v = get(key);
  return v ? *v : std::string(fallback);
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::config, std::string(what) + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  text = trim(text);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::config,
                std::string(what) + ": '" + std::string(text) + "' is not a nonnegative integer");
  }
  return value;
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  return v ? parse_double(*v, key) : fallback;
}

std::size_t KeyValueConfig::get_size(std::string_view key, std::size_t fallback) const {
  auto v = get(key);
  return v ? parse_size(*v, key) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(std::string_view key, std::uint64_t fallback) const {
  auto v = get(key);
  return v ? static_cast<std::uint64_t>(parse_size(*v, key)) : fallback;
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw Error(ErrorKind::config, std::string(key) + ": '" + *v + "' is not a boolean");
}

std::vector<std::string> KeyValueConfig::get_list(std::string_view key) const {
  auto v = get(key);
  return v ? split_list(*v) : std::vector<std::string>{};
}

std::vector<std::string> split_list(std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto item = trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(unquote(item));
    start = end + 1;
  }
  return out;
}

}  // namespace promptsel
