#include "linearize4/rational.hpp"

#include <cmath>
#include <limits>

namespace lin4 {
namespace {

using int128 = __int128;

std::int64_t narrow(int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("rational arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

int128 abs128(int128 v) { return v < 0 ? -v : v; }

int128 gcd128(int128 a, int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational reduced(int128 n, int128 d) {
  if (d == 0) throw DomainError("zero denominator in rational");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rational r;
  r.num = narrow(n);
  r.den = narrow(d);
  return r;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  *this = reduced(n, d);
}

std::string Rational::str() const {
  std::string s = std::to_string(num);
  if (den != 1) s += "/" + std::to_string(den);
  return s;
}

Rational operator+(const Rational& a, const Rational& b) {
  return reduced(int128(a.num) * b.den + int128(b.num) * a.den,
                 int128(a.den) * b.den);
}

Rational operator-(const Rational& a, const Rational& b) {
  return reduced(int128(a.num) * b.den - int128(b.num) * a.den,
                 int128(a.den) * b.den);
}

Rational operator-(const Rational& a) { return Rational(-a.num, a.den); }

Rational operator*(const Rational& a, const Rational& b) {
  return reduced(int128(a.num) * b.num, int128(a.den) * b.den);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw DomainError("division by zero rational");
  return reduced(int128(a.num) * b.den, int128(a.den) * b.num);
}

int compare(const Rational& a, const Rational& b) {
  int128 lhs = int128(a.num) * b.den;
  int128 rhs = int128(b.num) * a.den;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

Rational rat_pow(const Rational& a, std::int64_t e) {
  if (e == 0) return Rational(1);
  if (a.is_zero()) {
    if (e < 0) throw DomainError("zero raised to a negative power");
    return Rational(0);
  }
  Rational base = e < 0 ? Rational(a.den, a.num) : a;
  std::uint64_t n = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1
                          : static_cast<std::uint64_t>(e);
  Rational acc(1);
  while (n > 0) {
    if (n & 1) acc = acc * base;
    base = n > 1 ? base * base : base;
    n >>= 1;
  }
  return acc;
}

namespace {

std::optional<std::int64_t> isqrt_exact(std::int64_t v) {
  if (v < 0) return std::nullopt;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  for (std::int64_t c = r > 1 ? r - 1 : 0; c <= r + 1; ++c)
    if (c * c == v) return c;
  return std::nullopt;
}

}  // namespace

std::optional<Rational> rat_sqrt(const Rational& a) {
  if (a.is_negative()) return std::nullopt;
  auto n = isqrt_exact(a.num);
  auto d = isqrt_exact(a.den);
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

namespace {

constexpr std::int64_t kMaxDenominator = std::int64_t(1) << 20;

// Best rational approximation with bounded denominator (continued
// fractions). Exact when the value is representable within the bound.
Rational best_rational(double v, std::int64_t max_den) {
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = v;
  for (int iter = 0; iter < 64; ++iter) {
    double fa = std::floor(x);
    if (fa > 9e18 || fa < -9e18) break;
    auto a = static_cast<std::int64_t>(fa);
    int128 p2 = int128(a) * p1 + p0;
    int128 q2 = int128(a) * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = narrow(p2);
    q1 = narrow(q2);
    double frac = x - fa;
    if (frac < 1e-18 ||
        std::fabs(double(p1) / double(q1) - v) <= 1e-15 * std::fabs(v))
      break;
    x = 1.0 / frac;
  }
  if (q1 == 0) throw EngineError("value out of rational range");
  return Rational(p1, q1);
}

}  // namespace

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw EngineError("non-finite value has no rational form");
  if (v == 0.0) return Rational(0);
  // exact for values representable with denominator up to 2^20
  int exp = 0;
  double m = std::frexp(v, &exp);  // v = m * 2^exp, 0.5 <= |m| < 1
  auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  exp -= 53;
  while (mant != 0 && (mant & 1) == 0) {
    mant >>= 1;
    ++exp;
  }
  if (exp >= 0 && exp <= 40 &&
      std::fabs(v) < 9.0e18) {
    return Rational(static_cast<std::int64_t>(int128(mant) << exp));
  }
  if (exp < 0 && -exp <= 20) return Rational(mant, std::int64_t(1) << -exp);
  // otherwise the nearest bounded-denominator rational (relative error
  // around 1e-12, far below every tolerance in this library)
  return best_rational(v, kMaxDenominator);
}

}  // namespace lin4
