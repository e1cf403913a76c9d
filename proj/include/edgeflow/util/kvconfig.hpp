#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgeflow/util/errors.hpp"
#include "edgeflow/util/rational.hpp"

namespace edgeflow::util {

// Plain-text "key = value" configuration. One assignment per line, '#'
// starts a comment, keys are dotted paths. Duplicate keys are an error.
class KvConfig {
public:
  static KvConfig parse_file(const std::string& path);
  static KvConfig parse_text(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  std::string require(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;

  // Typed accessors; errors carry "<origin>:<line>".
  std::int64_t require_int(const std::string& key) const;
  std::int64_t int_or(const std::string& key, std::int64_t fallback) const;
  Rational require_number(const std::string& key) const;
  std::int64_t require_duration_ns(const std::string& key) const;
  std::int64_t duration_ns_or(const std::string& key, std::int64_t fallback) const;

  // Keys beginning with `prefix`, in file order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  int line_of(const std::string& key) const;
  const std::string& origin() const { return origin_; }

  // "<origin>:<line>: <message>" for the given key (line 0 if unknown).
  ParseError error_at(const std::string& key, const std::string& message) const;

private:
  struct Entry {
    std::string value;
    int line = 0;
    int order = 0;
  };
  std::map<std::string, Entry> entries_;
  std::string origin_;
};

}  // namespace edgeflow::util
