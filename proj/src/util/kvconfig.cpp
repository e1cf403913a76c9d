#include "edgeflow/util/kvconfig.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "edgeflow/util/duration.hpp"

namespace edgeflow::util {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KvConfig KvConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

KvConfig KvConfig::parse_text(const std::string& text, const std::string& origin) {
  KvConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int order = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(lineno), "expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ParseError(origin + ":" + std::to_string(lineno), "empty key");
    if (cfg.entries_.count(key))
      throw ParseError(origin + ":" + std::to_string(lineno),
                       "duplicate key '" + key + "' (first set on line " +
                           std::to_string(cfg.entries_[key].line) + ")");
    cfg.entries_[key] = Entry{value, lineno, order++};
  }
  return cfg;
}

bool KvConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

std::optional<std::string> KvConfig::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

std::string KvConfig::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw ParseError(origin_, "missing required key '" + key + "'");
  return *v;
}

std::string KvConfig::get_or(const std::string& key, const std::string& fallback) const {
  auto v = get(key);
  return v ? *v : fallback;
}

std::int64_t KvConfig::require_int(const std::string& key) const {
  Rational r = require_number(key);
  if (!r.is_integer()) throw error_at(key, "'" + key + "' must be an integer");
  return r.to_int64_exact();
}

std::int64_t KvConfig::int_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? require_int(key) : fallback;
}

Rational KvConfig::require_number(const std::string& key) const {
  try {
    return Rational::from_decimal(require(key));
  } catch (const ParseError& e) {
    throw error_at(key, e.what());
  }
}

std::int64_t KvConfig::require_duration_ns(const std::string& key) const {
  try {
    return parse_duration_ns(require(key));
  } catch (const ParseError& e) {
    throw error_at(key, e.what());
  }
}

std::int64_t KvConfig::duration_ns_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? require_duration_ns(key) : fallback;
}

std::vector<std::string> KvConfig::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::pair<int, std::string>> hits;
  for (const auto& [k, e] : entries_)
    if (k.rfind(prefix, 0) == 0) hits.emplace_back(e.order, k);
  std::sort(hits.begin(), hits.end());
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (auto& [_, k] : hits) out.push_back(k);
  return out;
}

int KvConfig::line_of(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

ParseError KvConfig::error_at(const std::string& key, const std::string& message) const {
  return ParseError(origin_ + ":" + std::to_string(line_of(key)), message);
}

}  // namespace edgeflow::util
