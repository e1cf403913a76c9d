#pragma once

#include <cstdint>
#include <string>

#include "edgeflow/util/errors.hpp"

namespace edgeflow::util {

// Exact rational arithmetic over 128-bit integers. The cost evaluators and
// the virtual-time accounting need exact sums and comparisons; doubles lose
// nanosecond resolution once totals pass ~2^53 ns (~104 days) and products
// of counts and unit costs overflow long before that.
//
// Denominators stay small in practice (decimal fractions from config text,
// link rates), so 128-bit intermediates do not overflow for any realistic
// query. Overflow in debug paths throws rather than wrapping.
class Rational {
public:
  using Int = __int128;

  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(Int num, Int den);

  static Rational from_int64(std::int64_t v) { return Rational(v); }
  // Exact conversion: every finite double is m * 2^e.
  static Rational from_double(double v);
  // Parse decimal text: "0.1", "2.44", "1e9", "-3.5e-2", "19".
  static Rational from_decimal(const std::string& text);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational operator-() const { return Rational(-num_, den_); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return den_ == 1; }

  // Integer conversions. to_int64_exact throws unless den == 1.
  std::int64_t to_int64_exact() const;
  std::int64_t floor_int64() const;
  std::int64_t ceil_int64() const;
  // Round half away from zero.
  std::int64_t round_int64() const;

  double to_double() const;

  Int num() const { return num_; }
  Int den() const { return den_; }

  // Exact decimal rendering: terminating expansion when the denominator is
  // 10-smooth (always the case for decimal-parsed inputs and integer unit
  // costs), otherwise rounded to max_frac_digits.
  std::string to_decimal_string(int max_frac_digits = 12) const;

private:
  void normalize();

  Int num_;
  Int den_;  // > 0
};

}  // namespace edgeflow::util
