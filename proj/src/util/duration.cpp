#include "edgeflow/util/duration.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace edgeflow::util {

namespace {

std::int64_t parse_impl(const std::string& text, bool allow_negative) {
  size_t i = text.size();
  while (i > 0 && std::isalpha(static_cast<unsigned char>(text[i - 1]))) --i;
  std::string number = text.substr(0, i);
  std::string unit = text.substr(i);

  std::int64_t mult = 0;
  if (unit == "s")
    mult = 1'000'000'000;
  else if (unit == "ms")
    mult = 1'000'000;
  else if (unit == "us")
    mult = 1'000;
  else if (unit == "ns")
    mult = 1;
  else if (unit == "m")
    mult = 60LL * 1'000'000'000;
  else if (unit == "h")
    mult = 3600LL * 1'000'000'000;
  else
    throw ParseError("", "duration '" + text + "' needs a unit suffix (s, ms, us, ns, m, h)");

  Rational value = Rational::from_decimal(number) * Rational(mult);
  if (!value.is_integer())
    throw ParseError("", "duration '" + text + "' is not a whole number of nanoseconds");
  std::int64_t ns = value.to_int64_exact();
  if (ns < 0 && !allow_negative) throw ParseError("", "duration '" + text + "' is negative");
  return ns;
}

}  // namespace

std::int64_t parse_duration_ns(const std::string& text) { return parse_impl(text, false); }

std::int64_t parse_duration_ns_signed(const std::string& text) { return parse_impl(text, true); }

std::string ns_to_seconds_string(std::int64_t ns) {
  return rational_ns_to_seconds_string(Rational(ns));
}

std::string ns_to_seconds_fixed(std::int64_t ns, int decimals) {
  bool neg = ns < 0;
  unsigned long long mag = neg ? -static_cast<unsigned long long>(ns) : ns;
  // Round half up at the requested precision.
  unsigned long long scale = 1;
  for (int i = 0; i < 9 - decimals; ++i) scale *= 10;
  unsigned long long units = (mag + scale / 2) / scale;  // value in 10^-decimals s
  unsigned long long pow10 = 1;
  for (int i = 0; i < decimals; ++i) pow10 *= 10;
  char buf[64];
  if (decimals == 0) {
    std::snprintf(buf, sizeof(buf), "%s%llu", neg ? "-" : "", units);
  } else {
    std::snprintf(buf, sizeof(buf), "%s%llu.%0*llu", neg ? "-" : "", units / pow10, decimals,
                  units % pow10);
  }
  return buf;
}

std::string rational_ns_to_seconds_string(const Rational& ns) {
  return (ns / Rational(1'000'000'000)).to_decimal_string(12);
}

}  // namespace edgeflow::util
