#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "linearize4/errors.hpp"
#include "linearize4/rational.hpp"

namespace lin4 {

enum class Kind { Number, Symbol, Kernel, Pow, Mul, Add };

enum class KernelTag { Sin, Cos, Tan, Sec, Tanh, Exp, Ln };

const char* kernel_name(KernelTag tag);

// Immutable expression tree over exact rational constants, symbols,
// n-ary sums/products, rational powers (integer or half-integer exponent)
// and a small set of analytic kernels. Square roots are carried as powers
// with exponent 1/2; the parser and printer spell them `sqrt(...)`.
//
// Every factory normalizes: sums are flattened with like terms collected,
// products are flattened, distributed over sums, and merged by base, and
// rational subtrees fold to exact constants. Operand order is a fixed total
// order, so structurally equal values print identically.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr number(Rational v);
  static Expr number(std::int64_t n) { return number(Rational(n)); }
  static Expr number(std::int64_t p, std::int64_t q) {
    return number(Rational(p, q));
  }
  static Expr symbol(std::string name);
  static Expr kernel(KernelTag tag, Expr argument);
  static Expr pow(Expr base, Rational exponent);
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr sqrt(Expr e) { return pow(std::move(e), Rational(1, 2)); }

  Kind kind() const;
  const Rational& number_value() const;   // Kind::Number
  const std::string& symbol_name() const; // Kind::Symbol
  KernelTag kernel_tag() const;           // Kind::Kernel
  const Expr& kernel_arg() const;         // Kind::Kernel
  const Expr& pow_base() const;           // Kind::Pow
  const Rational& pow_exp() const;        // Kind::Pow
  const std::vector<Expr>& operands() const;  // Kind::Add / Kind::Mul

  bool is_number() const { return kind() == Kind::Number; }
  bool is_zero() const;
  bool is_one() const;

  friend int compare(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Node&& node);
  static Expr raw_mul_tail(const std::vector<Expr>& kids);

  std::shared_ptr<const Node> node_;
};

// Fixed total order on expressions: by node kind, then recursively.
int compare(const Expr& a, const Expr& b);
inline bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
inline bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

inline Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
inline Expr operator-(const Expr& a) { return Expr::mul({Expr::number(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) {
  return Expr::mul({a, Expr::pow(b, Rational(-1))});
}
inline Expr pow(const Expr& base, std::int64_t e) {
  return Expr::pow(base, Rational(e));
}

using Bindings = std::map<std::string, double, std::less<>>;

std::string to_string(const Expr& e);

// Infix grammar: `+ - * / ^`, parentheses, one-argument kernel calls,
// decimal/rational literals (exact), identifiers as symbols. `^` binds
// tighter than unary minus and associates right; exponents must be rational
// literals with denominator 1 or 2.
Expr parse(std::string_view text);

// Exact partial derivative; symbols other than `variable` are constants.
Expr differentiate(const Expr& e, std::string_view variable);

// Bottom-up binary64 evaluation. Unbound symbols and domain violations
// (poles within 1e-12, negative radicands, non-positive logarithms,
// singular denominators) throw.
double evaluate(const Expr& e, const Bindings& bindings);

// Capture-free substitution of a symbol, followed by normalization.
Expr substitute(const Expr& e, std::string_view symbol, const Expr& replacement);

std::set<std::string> free_symbols(const Expr& e);

// Rebuild through the normalizing factories (idempotent).
Expr normalize(const Expr& e);

// Deterministic sampling source shared by the decision procedures:
// components uniform over [-2, -0.1] U [0.1, 2].
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}
  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }
  double sample() {
    double m = 0.1 + 1.9 * uniform01();
    return (gen_() & 1) ? m : -m;
  }

 private:
  std::mt19937_64 gen_;
};

struct ZeroTest {
  enum class Status { Zero, NonZero, Inconclusive };
  Status status = Status::Inconclusive;
  double max_residual = 0.0;  // largest scaled magnitude seen while sampling
  bool exact = false;         // decided by the rational normal form alone
  bool is_zero() const { return status == Status::Zero; }
};

// Identity-to-zero test: first an exact rational normal form with kernels
// (and surviving half-integer powers) as opaque atoms; if that is not the
// literal zero, 20 seeded sample points decide at relative tolerance 1e-9
// against the largest additive term. Deterministic for a fixed seed.
ZeroTest zero_test(const Expr& e, std::uint64_t seed);

// Boolean wrapper around zero_test; Inconclusive throws.
bool is_identically_zero(const Expr& e, std::uint64_t seed);

}  // namespace lin4
