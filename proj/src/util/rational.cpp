#include "edgeflow/util/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace edgeflow::util {

namespace {

using Int = Rational::Int;

Int int_abs(Int v) { return v < 0 ? -v : v; }

Int int_gcd(Int a, Int b) {
  a = int_abs(a);
  b = int_abs(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

[[noreturn]] void overflow() { throw ParameterError("rational arithmetic overflow"); }

Int checked_mul(Int a, Int b) {
  if (a == 0 || b == 0) return 0;
  Int r = a * b;
  if (r / b != a) overflow();
  return r;
}

Int checked_add(Int a, Int b) {
  Int r = a + b;
  if ((b > 0 && r < a) || (b < 0 && r > a)) overflow();
  return r;
}

}  // namespace

Rational::Rational(Int num, Int den) : num_(num), den_(den) {
  if (den_ == 0) throw ParameterError("rational with zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  Int g = int_gcd(num_, den_);
  num_ /= g;
  den_ /= g;
}

Rational Rational::from_double(double v) {
  if (!std::isfinite(v)) throw ParameterError("non-finite value");
  if (v == 0.0) return Rational();
  int exp = 0;
  double mant = std::frexp(v, &exp);  // v = mant * 2^exp, |mant| in [0.5, 1)
  // 53 mantissa bits make mant * 2^53 integral.
  auto num = static_cast<Int>(std::ldexp(mant, 53));
  int e2 = exp - 53;
  Int den = 1;
  while (e2 > 0) {
    num = checked_mul(num, 2);
    --e2;
  }
  while (e2 < 0) {
    den = checked_mul(den, 2);
    ++e2;
  }
  return Rational(num, den);
}

Rational Rational::from_decimal(const std::string& text) {
  const char* p = text.c_str();
  const char* end = p + text.size();
  auto fail = [&]() -> Rational { throw ParseError("", "invalid number: '" + text + "'"); };

  bool neg = false;
  if (p < end && (*p == '+' || *p == '-')) {
    neg = (*p == '-');
    ++p;
  }
  Int mant = 0;
  int frac_digits = 0;
  bool any_digit = false;
  for (; p < end && std::isdigit(static_cast<unsigned char>(*p)); ++p) {
    mant = checked_add(checked_mul(mant, 10), *p - '0');
    any_digit = true;
  }
  if (p < end && *p == '.') {
    ++p;
    for (; p < end && std::isdigit(static_cast<unsigned char>(*p)); ++p) {
      mant = checked_add(checked_mul(mant, 10), *p - '0');
      ++frac_digits;
      any_digit = true;
    }
  }
  if (!any_digit) return fail();
  long exp10 = 0;
  if (p < end && (*p == 'e' || *p == 'E')) {
    ++p;
    char* after = nullptr;
    exp10 = std::strtol(p, &after, 10);
    if (after == p) return fail();
    p = after;
  }
  if (p != end) return fail();

  Int num = neg ? -mant : mant;
  Int den = 1;
  long e = exp10 - frac_digits;
  while (e > 0) {
    num = checked_mul(num, 10);
    --e;
  }
  while (e < 0) {
    den = checked_mul(den, 10);
    ++e;
  }
  return Rational(num, den);
}

Rational Rational::operator+(const Rational& o) const {
  Int g = int_gcd(den_, o.den_);
  Int lhs = checked_mul(num_, o.den_ / g);
  Int rhs = checked_mul(o.num_, den_ / g);
  return Rational(checked_add(lhs, rhs), checked_mul(den_ / g, o.den_));
}

Rational Rational::operator-(const Rational& o) const { return *this + Rational(-o.num_, o.den_); }

Rational Rational::operator*(const Rational& o) const {
  Int g1 = int_gcd(num_, o.den_);
  Int g2 = int_gcd(o.num_, den_);
  return Rational(checked_mul(num_ / g1, o.num_ / g2), checked_mul(den_ / g2, o.den_ / g1));
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw ParameterError("rational division by zero");
  return *this * Rational(o.den_, o.num_);
}

bool Rational::operator<(const Rational& o) const {
  // Denominators are positive, so cross-multiplication preserves order.
  Int g = int_gcd(den_, o.den_);
  return checked_mul(num_, o.den_ / g) < checked_mul(o.num_, den_ / g);
}

std::int64_t Rational::to_int64_exact() const {
  if (den_ != 1) throw ParameterError("rational is not an integer");
  if (num_ > std::numeric_limits<std::int64_t>::max() ||
      num_ < std::numeric_limits<std::int64_t>::min())
    overflow();
  return static_cast<std::int64_t>(num_);
}

std::int64_t Rational::floor_int64() const {
  Int q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  if (q > std::numeric_limits<std::int64_t>::max() || q < std::numeric_limits<std::int64_t>::min())
    overflow();
  return static_cast<std::int64_t>(q);
}

std::int64_t Rational::ceil_int64() const {
  Int q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  if (q > std::numeric_limits<std::int64_t>::max() || q < std::numeric_limits<std::int64_t>::min())
    overflow();
  return static_cast<std::int64_t>(q);
}

std::int64_t Rational::round_int64() const {
  Int twice = checked_mul(int_abs(num_), 2);
  Int q = twice / den_;
  Int mag = q / 2 + (q % 2);  // half away from zero
  if (mag > std::numeric_limits<std::int64_t>::max()) overflow();
  auto r = static_cast<std::int64_t>(mag);
  return num_ < 0 ? -r : r;
}

double Rational::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_decimal_string(int max_frac_digits) const {
  Int n = int_abs(num_);
  Int whole = n / den_;
  Int rem = n % den_;
  std::string digits;
  Int d = whole;
  if (d == 0) digits = "0";
  while (d > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(d % 10)));
    d /= 10;
  }
  std::string frac;
  Int r = rem;
  for (int i = 0; i < max_frac_digits && r != 0; ++i) {
    r = checked_mul(r, 10);
    frac.push_back(static_cast<char>('0' + static_cast<int>(r / den_)));
    r %= den_;
  }
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string out = (num_ < 0 && (whole != 0 || !frac.empty())) ? "-" : "";
  out += digits;
  if (!frac.empty()) out += "." + frac;
  return out;
}

}  // namespace edgeflow::util
