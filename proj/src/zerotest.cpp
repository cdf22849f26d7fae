#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "linearize4/expr.hpp"

namespace lin4 {
namespace {

constexpr double kZeroTol = 1e-9;
constexpr int kSamplePoints = 20;
constexpr int kAttemptsPerPoint = 8;
constexpr std::size_t kPolyTermCap = 20000;

// --- multivariate polynomial fraction over opaque atoms -------------------
//
// Atoms are symbols, kernels, and surviving half-integer powers; the
// conversion expands an expression into P/Q with exact rational
// coefficients. Only a literal-zero P proves the identity; anything else
// falls through to sampling (relations like sec^2 = 1 + tan^2 are invisible
// to this form on purpose).

using Monomial = std::map<int, int>;  // atom id -> exponent (non-zero)

struct Poly {
  std::map<Monomial, Rational> terms;
  bool is_zero() const { return terms.empty(); }
};

Poly poly_const(const Rational& c) {
  Poly p;
  if (!c.is_zero()) p.terms.emplace(Monomial{}, c);
  return p;
}

Poly poly_atom(int id) {
  Poly p;
  p.terms.emplace(Monomial{{id, 1}}, Rational(1));
  return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b.terms) {
    auto [it, inserted] = out.terms.emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (it->second.is_zero()) out.terms.erase(it);
    }
  }
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.terms.size() * b.terms.size() > kPolyTermCap)
    throw std::overflow_error("polynomial normal form too large");
  Poly out;
  for (const auto& [ma, ca] : a.terms) {
    for (const auto& [mb, cb] : b.terms) {
      Monomial m = ma;
      for (const auto& [id, e] : mb) {
        int& slot = m[id];
        slot += e;
        if (slot == 0) m.erase(id);
      }
      Rational c = ca * cb;
      auto [it, inserted] = out.terms.emplace(std::move(m), c);
      if (!inserted) {
        it->second = it->second + c;
        if (it->second.is_zero()) out.terms.erase(it);
      }
    }
  }
  if (out.terms.size() > kPolyTermCap)
    throw std::overflow_error("polynomial normal form too large");
  return out;
}

Poly poly_pow(const Poly& a, std::int64_t n) {
  Poly acc = poly_const(Rational(1));
  for (std::int64_t i = 0; i < n; ++i) acc = poly_mul(acc, a);
  return acc;
}

struct Frac {
  Poly num;
  Poly den;
};

// Overflow aborts add/mul/pow mid-expression; building the result member by
// member keeps the unwinding path leak-free (braced aggregate initialization
// with a throwing initializer drops completed members on this toolchain).

Frac frac_of(Poly p) {
  Frac out;
  out.num = std::move(p);
  out.den = poly_const(Rational(1));
  return out;
}

Frac frac_add(const Frac& a, const Frac& b) {
  Frac out;
  out.num = poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den));
  out.den = poly_mul(a.den, b.den);
  return out;
}

Frac frac_mul(const Frac& a, const Frac& b) {
  Frac out;
  out.num = poly_mul(a.num, b.num);
  out.den = poly_mul(a.den, b.den);
  return out;
}

Frac frac_inv(const Frac& a) {
  if (a.num.is_zero())
    throw DomainError("division by zero in exact normal form");
  Frac out;
  out.num = a.den;
  out.den = a.num;
  return out;
}

Frac frac_pow(const Frac& a, std::int64_t n) {
  if (n < 0) return frac_pow(frac_inv(a), -n);
  Frac out;
  out.num = poly_pow(a.num, n);
  out.den = poly_pow(a.den, n);
  return out;
}

struct AtomTable {
  std::vector<Expr> atoms;
  int id_of(const Expr& e) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (compare(atoms[i], e) == 0) return static_cast<int>(i);
    atoms.push_back(e);
    return static_cast<int>(atoms.size() - 1);
  }
};

Frac to_frac(const Expr& e, AtomTable& table) {
  switch (e.kind()) {
    case Kind::Number:
      return frac_of(poly_const(e.number_value()));
    case Kind::Symbol:
    case Kind::Kernel:
      return frac_of(poly_atom(table.id_of(e)));
    case Kind::Pow: {
      const Rational& r = e.pow_exp();
      if (r.is_integer()) return frac_pow(to_frac(e.pow_base(), table), r.num);
      // half-integer: sqrt(base) is the atom, raised to the odd numerator
      Expr atom = Expr::pow(e.pow_base(), Rational(1, 2));
      if (atom.kind() != Kind::Pow)  // folded to something simpler
        return frac_pow(to_frac(atom, table), r.num);
      return frac_pow(frac_of(poly_atom(table.id_of(atom))), r.num);
    }
    case Kind::Mul: {
      Frac acc = frac_of(poly_const(Rational(1)));
      for (const Expr& k : e.operands()) acc = frac_mul(acc, to_frac(k, table));
      return acc;
    }
    case Kind::Add: {
      Frac acc = frac_of(poly_const(Rational(0)));
      for (const Expr& k : e.operands()) acc = frac_add(acc, to_frac(k, table));
      return acc;
    }
  }
  throw EngineError("unreachable expression kind");
}

}  // namespace

ZeroTest zero_test(const Expr& e, std::uint64_t seed) {
  if (e.is_zero()) return {ZeroTest::Status::Zero, 0.0, true};

  try {
    AtomTable table;
    Frac f = to_frac(e, table);
    if (f.num.is_zero()) return {ZeroTest::Status::Zero, 0.0, true};
  } catch (const std::overflow_error&) {
    // exact path gave up; sampling decides
  } catch (const DomainError&) {
  }

  std::vector<Expr> terms;
  if (e.kind() == Kind::Add)
    terms = e.operands();
  else
    terms = {e};

  auto eval_point = [&](const Bindings& b, double& rel) {
    double scale = 0.0;
    double value = 0.0;
    for (const Expr& t : terms) {
      double tv = evaluate(t, b);
      scale = std::max(scale, std::fabs(tv));
      value += tv;
    }
    rel = std::fabs(value) / (1.0 + scale);
  };

  auto syms = free_symbols(e);
  if (syms.empty()) {
    double rel = 0.0;
    try {
      eval_point({}, rel);
    } catch (const DomainError&) {
      return {ZeroTest::Status::Inconclusive, 0.0, false};
    }
    return {rel < kZeroTol ? ZeroTest::Status::Zero : ZeroTest::Status::NonZero,
            rel, false};
  }

  SampleRng rng(seed);
  double max_rel = 0.0;
  int failed_points = 0;
  for (int point = 0; point < kSamplePoints; ++point) {
    bool ok = false;
    for (int attempt = 0; attempt < kAttemptsPerPoint && !ok; ++attempt) {
      Bindings b;
      for (const auto& name : syms) b[name] = rng.sample();
      double rel = 0.0;
      try {
        eval_point(b, rel);
      } catch (const DomainError&) {
        continue;
      }
      max_rel = std::max(max_rel, rel);
      if (rel >= kZeroTol) return {ZeroTest::Status::NonZero, max_rel, false};
      ok = true;
    }
    if (!ok) ++failed_points;
  }
  if (failed_points > kSamplePoints / 2)
    return {ZeroTest::Status::Inconclusive, max_rel, false};
  return {ZeroTest::Status::Zero, max_rel, false};
}

bool is_identically_zero(const Expr& e, std::uint64_t seed) {
  ZeroTest z = zero_test(e, seed);
  if (z.status == ZeroTest::Status::Inconclusive)
    throw InconclusiveError("zero test inconclusive for `" + to_string(e) + "`");
  return z.is_zero();
}

}  // namespace lin4
