#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "linearize4/errors.hpp"

namespace lin4 {

// Exact rational over 64-bit integers. Always reduced, denominator > 0.
// Intermediate products run in 128-bit arithmetic; a result that does not fit
// back into 64 bits throws std::overflow_error, which callers treat as "give
// up on the exact path".
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d);

  bool is_zero() const { return num == 0; }
  bool is_one() const { return num == 1 && den == 1; }
  bool is_integer() const { return den == 1; }
  bool is_negative() const { return num < 0; }
  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  std::string str() const;
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator-(const Rational& a, const Rational& b);
Rational operator-(const Rational& a);
Rational operator*(const Rational& a, const Rational& b);
Rational operator/(const Rational& a, const Rational& b);

// Three-way comparison by value; exact.
int compare(const Rational& a, const Rational& b);
inline bool operator==(const Rational& a, const Rational& b) {
  return a.num == b.num && a.den == b.den;
}
inline bool operator!=(const Rational& a, const Rational& b) {
  return !(a == b);
}
inline bool operator<(const Rational& a, const Rational& b) {
  return compare(a, b) < 0;
}

// a^e for any integer e; throws DomainError for 0^negative.
Rational rat_pow(const Rational& a, std::int64_t e);

// Exact square root when numerator and denominator are both perfect squares.
std::optional<Rational> rat_sqrt(const Rational& a);

// Rational form of a binary64: exact whenever the value is representable
// with denominator at most 2^20 (every short decimal is), otherwise the
// best rational approximation under that denominator bound (relative error
// around 1e-12). The bound keeps products of several converted values
// inside 64-bit arithmetic.
Rational rational_from_double(double v);

}  // namespace lin4
