#pragma once

#include <cstdint>
#include <string>

#include "edgeflow/util/rational.hpp"

namespace edgeflow::util {

// Durations are integer nanoseconds everywhere inside the system. Config
// files spell them with a unit suffix: "19s", "48ms", "2.44us", "350ns".
// A value that does not land on a whole nanosecond is rejected rather than
// silently rounded.
std::int64_t parse_duration_ns(const std::string& text);

// Same grammar but negative values allowed (used by validation tests).
std::int64_t parse_duration_ns_signed(const std::string& text);

// Exact decimal seconds from integer nanoseconds: 31000000000 -> "31",
// 19586800000 -> "19.5868". Used for CSV output so reports are bit-stable.
std::string ns_to_seconds_string(std::int64_t ns);

// Fixed-point seconds for human output: 19586800000, 3 -> "19.587".
std::string ns_to_seconds_fixed(std::int64_t ns, int decimals);

// Exact decimal seconds from a rational nanosecond count.
std::string rational_ns_to_seconds_string(const Rational& ns);

}  // namespace edgeflow::util
