#include "linearize4/construct.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace lin4 {
namespace {

Expr n(std::int64_t v) { return Expr::number(v); }
Expr dx(const Expr& e) { return differentiate(e, "x"); }
Expr dy(const Expr& e) { return differentiate(e, "y"); }

// Substitutes the first probe value that keeps the expression well formed.
// Sound only after the expression passed a zero test on its derivative in
// `name`: any valid sample then represents the whole family.
Expr eliminate_symbol(const Expr& e, const char* name) {
  static const Rational probes[] = {Rational(0),  Rational(1), Rational(1, 2),
                                    Rational(2),  Rational(-1), Rational(3)};
  for (const Rational& p : probes) {
    try {
      return substitute(e, name, Expr::number(p));
    } catch (const DomainError&) {
      continue;
    }
  }
  throw EngineError("no valid probe value eliminates symbol " + std::string(name));
}

struct ChiShape {
  KernelTag tag = KernelTag::Tan;  // Tan or Tanh
  Expr argument;                   // k*x
  Expr k;
};

// Matches chi against 2k tan(kx) / -2k tanh(kx); nullopt for chi == 0,
// throws for anything else.
std::optional<ChiShape> match_chi(const Expr& chi, std::uint64_t seed) {
  if (chi.is_zero()) return std::nullopt;
  const Expr* kern = nullptr;
  if (chi.kind() == Kind::Kernel) {
    kern = &chi;
  } else if (chi.kind() == Kind::Mul) {
    for (const Expr& f : chi.operands())
      if (f.kind() == Kind::Kernel &&
          (f.kernel_tag() == KernelTag::Tan || f.kernel_tag() == KernelTag::Tanh)) {
        kern = &f;
        break;
      }
  }
  if (kern == nullptr ||
      (kern->kernel_tag() != KernelTag::Tan && kern->kernel_tag() != KernelTag::Tanh))
    throw UnsupportedChiError("unsupported chi shape: " + to_string(chi));

  ChiShape shape;
  shape.tag = kern->kernel_tag();
  shape.argument = kern->kernel_arg();
  shape.k = shape.argument / Expr::symbol("x");
  if (free_symbols(shape.k).count("x"))
    throw UnsupportedChiError("chi argument is not linear in x: " + to_string(chi));

  Expr candidate = shape.tag == KernelTag::Tan
                       ? n(2) * shape.k * Expr::kernel(KernelTag::Tan, shape.argument)
                       : n(-2) * shape.k * Expr::kernel(KernelTag::Tanh, shape.argument);
  if (candidate != chi && !zero_test(candidate - chi, seed).is_zero())
    throw UnsupportedChiError("unsupported chi shape: " + to_string(chi));
  return shape;
}

}  // namespace

Expr riccati_rhs(const OdeCoefficients& c, std::uint64_t seed) {
  Expr r = (n(8) * c.c0 - n(3) * pow(c.a0, 2) - n(12) * dx(c.a0)) / n(40);
  if (free_symbols(r).count("y")) {
    if (!zero_test(dy(r), seed).is_zero())
      throw YDependenceError(
          "Riccati right-hand side depends on y: " + to_string(r));
    r = eliminate_symbol(r, "y");
  }
  return r;
}

ChiSolution solve_riccati(const Expr& r, std::uint64_t seed) {
  Expr rc = r;
  if (free_symbols(rc).count("x")) {
    if (!zero_test(differentiate(rc, "x"), seed).is_zero())
      return ChiSolution{false, Expr::number(0), r, 0.0};
    rc = eliminate_symbol(rc, "x");
  }
  ChiSolution out;
  out.closed_form = true;
  out.rhs = rc;
  if (rc.is_zero()) {
    out.chi = Expr::number(0);
    return out;
  }
  // Numeric constants pick the branch by sign; with symbolic parameters the
  // oscillatory (tangent) branch is the convention.
  bool negative = false;
  try {
    negative = evaluate(rc, {}) < 0.0;
  } catch (const EngineError&) {
  }
  Expr x = Expr::symbol("x");
  if (negative) {
    Expr k = Expr::sqrt(n(-1) * rc / n(2));
    out.chi = n(-2) * k * Expr::kernel(KernelTag::Tanh, k * x);
  } else {
    Expr k = Expr::sqrt(rc / n(2));
    out.chi = n(2) * k * Expr::kernel(KernelTag::Tan, k * x);
  }
  return out;
}

Expr build_phi(const Expr& chi, std::uint64_t seed) {
  auto shape = match_chi(chi, seed);
  Expr phi = shape ? Expr::kernel(shape->tag, shape->argument) : Expr::symbol("x");
  Expr phix = dx(phi);
  if (!zero_test(dx(phix) - chi * phix, seed).is_zero())
    throw UnsupportedChiError("phi_xx/phi_x does not reproduce chi for " +
                              to_string(chi));
  return phi;
}

Expr build_psi(const OdeCoefficients& c, const Expr& chi, std::uint64_t seed) {
  const Expr x = Expr::symbol("x");
  const Expr y = Expr::symbol("y");

  // y-direction: a1 == 0 gives psi linear in y; otherwise 1/a1 must be
  // linear in y with constant slope p and 1/(4p) == 1, which integrates to
  // the monic quadratic y^2/2 + (q/p) y.
  bool quadratic = false;
  Expr shift = n(0);
  if (!c.a1.is_zero()) {
    Expr g = n(1) / c.a1;
    if (!zero_test(dy(dy(g)), seed).is_zero())
      throw UnsupportedShapeError("a1 is not a reciprocal linear function of y: " +
                                  to_string(c.a1));
    Expr p = dy(g);
    if (zero_test(p, seed).is_zero())
      throw UnsupportedShapeError("a1 has no y dependence; exponential psi_y "
                                  "shapes are out of scope");
    if (!zero_test(dx(p), seed).is_zero() || !zero_test(dy(p), seed).is_zero())
      throw UnsupportedShapeError("slope of 1/a1 must be constant: " + to_string(p));
    p = eliminate_symbol(eliminate_symbol(p, "y"), "x");
    Expr scaling = n(4) * p - n(1);
    if (!zero_test(scaling, seed).is_zero())
      throw UnsupportedShapeError(
          "a1 shape integrates to a non-quadratic psi (need 1/(4 p) == 1, got p = " +
          to_string(p) + ")");
    Expr q = substitute(g, "y", n(0));
    if (free_symbols(q).count("x")) {
      if (!zero_test(dx(q), seed).is_zero())
        throw UnsupportedShapeError("offset of 1/a1 must be x-free: " + to_string(q));
      q = eliminate_symbol(q, "x");
    }
    shift = q / p;
    quadratic = true;
  }

  // x-direction: k'/k = (a0 + 6 chi)/4 with constant a0 and tabulated chi.
  Expr a0c = c.a0;
  if (free_symbols(a0c).count("y")) {
    if (!zero_test(dy(a0c), seed).is_zero())
      throw UnsupportedShapeError("a0 must be independent of y: " + to_string(a0c));
    a0c = eliminate_symbol(a0c, "y");
  }
  if (free_symbols(a0c).count("x")) {
    if (!zero_test(dx(a0c), seed).is_zero())
      throw UnsupportedShapeError("non-constant a0 is out of scope: " +
                                  to_string(a0c));
    a0c = eliminate_symbol(a0c, "x");
  }
  Expr kx = n(1);
  if (!a0c.is_zero()) kx = Expr::kernel(KernelTag::Exp, a0c * x / n(4));
  if (auto shape = match_chi(chi, seed)) {
    if (shape->tag == KernelTag::Tan) {
      kx = kx * pow(Expr::kernel(KernelTag::Sec, shape->argument), 3);
    } else {
      // integral of 6 chi / 4 is -3 ln cosh(kx); cosh^-3 = (1 - tanh^2)^(3/2)
      kx = kx * Expr::pow(n(1) - pow(Expr::kernel(KernelTag::Tanh, shape->argument), 2),
                          Rational(3, 2));
    }
  }

  Expr psi = quadratic ? kx * (pow(y, 2) / n(2) + shift * y) : kx * y;

  Expr psi_y = dy(psi);
  if (!zero_test(n(4) * dy(psi_y) - psi_y * c.a1, seed).is_zero())
    throw CompatibilityFailureError("psi_yy equation residual is nonzero");
  if (!zero_test(n(4) * dx(psi_y) - psi_y * (c.a0 + n(6) * chi), seed).is_zero())
    throw CompatibilityFailureError("psi_xy equation residual is nonzero");

  // Fourth-order compatibility equation.
  Expr omega = compute_omega(c);
  Expr a0 = c.a0, a0x = dx(c.a0), c0 = c.c0, c0x = dx(c.c0);
  Expr psix = dx(psi), psixx = dx(psix), psixxx = dx(psixx);
  Expr residual =
      n(1600) * dx(psixxx) -
      (n(9600) * psixxx * chi +
       n(160) * psixx *
           (n(-12) * a0x - n(3) * pow(a0, 2) - n(90) * pow(chi, 2) + n(8) * c0) +
       n(40) * psix *
           (n(12) * a0x * a0 + n(72) * a0x * chi - n(16) * c0x + n(3) * pow(a0, 3) +
            n(18) * pow(a0, 2) * chi - n(12) * a0 * c0 + n(120) * pow(chi, 3) -
            n(48) * chi * c0 + n(24) * c.d1 - n(8) * omega) +
       psi * (n(144) * pow(a0x, 2) + n(72) * a0x * pow(a0, 2) -
              n(352) * a0x * c0 - n(160) * dx(c0x) - n(80) * c0x * a0 -
              n(1600) * dy(c.d0) + n(640) * dx(c.d1) - n(80) * dx(omega) +
              n(9) * pow(a0, 4) - n(88) * pow(a0, 2) * c0 + n(160) * a0 * c.d1 +
              n(30) * a0 * omega - n(400) * c.a1 * c.d0 + n(300) * chi * omega +
              n(144) * pow(c0, 2)) +
       n(1600) * psi_y * c.d0);
  if (!zero_test(residual, seed).is_zero())
    throw CompatibilityFailureError(
        "fourth-order compatibility equation residual is nonzero");
  return psi;
}

Expr compute_omega(const OdeCoefficients& c) {
  Expr a0x = dx(c.a0);
  return pow(c.a0, 3) - n(4) * c.a0 * c.c0 + n(8) * c.d1 - n(8) * dx(c.c0) +
         n(6) * a0x * c.a0 + n(4) * dx(a0x);
}

namespace {

// Rewrites an x-expression as a t-expression through t = phi(x) for the
// closed-form phi shapes; returns nullopt when a factor has no rational
// image (e.g. odd powers of cos under phi = tan(kx)).
std::optional<Expr> map_to_t(const Expr& e, const Expr& phi) {
  const Expr t = Expr::symbol("t");
  if (!free_symbols(e).count("x")) return e;
  if (phi.kind() == Kind::Symbol) return substitute(e, "x", t);

  const KernelTag phi_tag = phi.kernel_tag();
  const Expr& arg = phi.kernel_arg();

  // factor-level images
  auto map_pow = [&](const Expr& base, const Rational& exp) -> std::optional<Expr> {
    if (base.kind() == Kind::Kernel && base.kernel_arg() == arg) {
      if (phi_tag == KernelTag::Tan) {
        if (base.kernel_tag() == KernelTag::Tan)
          return Expr::pow(t, exp);
        if (base.kernel_tag() == KernelTag::Cos || base.kernel_tag() == KernelTag::Sec) {
          if (!exp.is_integer() || exp.num % 2 != 0) return std::nullopt;
          Rational half(exp.num / 2);
          Expr one_pl = n(1) + pow(t, 2);
          return Expr::pow(one_pl, base.kernel_tag() == KernelTag::Cos ? -half : half);
        }
        if (base.kernel_tag() == KernelTag::Sin) {
          // sin = tan * cos
          if (!exp.is_integer() || exp.num % 2 != 0) return std::nullopt;
          Rational half(exp.num / 2);
          return Expr::pow(t, exp) * Expr::pow(n(1) + pow(t, 2), -half);
        }
        return std::nullopt;
      }
      if (phi_tag == KernelTag::Tanh && base.kernel_tag() == KernelTag::Tanh)
        return Expr::pow(t, exp);
      return std::nullopt;
    }
    if (phi_tag == KernelTag::Tanh) {
      // (1 - tanh(kx)^2)^m -> (1 - t^2)^m
      Expr sech2 = n(1) - pow(Expr::kernel(KernelTag::Tanh, arg), 2);
      if (base == sech2) return Expr::pow(n(1) - pow(t, 2), exp);
    }
    return std::nullopt;
  };

  switch (e.kind()) {
    case Kind::Number:
      return e;
    case Kind::Symbol:
      return std::nullopt;  // bare x has no rational image
    case Kind::Kernel:
      return map_pow(e, Rational(1));
    case Kind::Pow:
      return map_pow(e.pow_base(), e.pow_exp());
    case Kind::Mul: {
      std::vector<Expr> kids;
      for (const Expr& k : e.operands()) {
        auto m = map_to_t(k, phi);
        if (!m) return std::nullopt;
        kids.push_back(*m);
      }
      return Expr::mul(std::move(kids));
    }
    case Kind::Add: {
      std::vector<Expr> kids;
      for (const Expr& k : e.operands()) {
        auto m = map_to_t(k, phi);
        if (!m) return std::nullopt;
        kids.push_back(*m);
      }
      return Expr::add(std::move(kids));
    }
  }
  return std::nullopt;
}

}  // namespace

LinearTarget build_linear_target(const OdeCoefficients& c,
                                 const PointTransformation& tr,
                                 std::uint64_t seed) {
  Expr phix = dx(tr.phi);
  Expr alpha_x = tr.omega / (n(8) * pow(phix, 3));

  Expr a0 = c.a0, a0x = dx(a0), c0 = c.c0, c0x = dx(c0);
  Expr bracket = n(-144) * pow(a0x, 2) - n(72) * a0x * pow(a0, 2) +
                 n(352) * a0x * c0 + n(160) * dx(c0x) + n(80) * c0x * a0 +
                 n(1600) * dy(c.d0) - n(640) * dx(c.d1) + n(80) * dx(tr.omega) -
                 n(9) * pow(a0, 4) + n(88) * pow(a0, 2) * c0 -
                 n(160) * a0 * c.d1 - n(30) * a0 * tr.omega +
                 n(400) * c.a1 * c.d0 - n(300) * tr.chi * tr.omega -
                 n(144) * pow(c0, 2);

  for (Expr* e : {&alpha_x, &bracket}) {
    if (!free_symbols(*e).count("y")) continue;
    if (!zero_test(dy(*e), seed).is_zero())
      throw YDependenceError("target coefficient depends on y: " + to_string(*e));
    *e = eliminate_symbol(*e, "y");
  }
  Expr beta_x = bracket / (n(1600) * pow(phix, 4));

  LinearTarget target;
  target.alpha_x = alpha_x;
  target.beta_x = beta_x;

  if (tr.phi.kind() == Kind::Symbol ||
      (tr.phi.kind() == Kind::Kernel && (tr.phi.kernel_tag() == KernelTag::Tan ||
                                         tr.phi.kernel_tag() == KernelTag::Tanh))) {
    auto at = map_to_t(alpha_x, tr.phi);
    auto bt = map_to_t(beta_x, tr.phi);
    if (at && bt) {
      // Invariant: substituting t = phi(x) must reproduce the x forms.
      if (!zero_test(substitute(*at, "t", tr.phi) - alpha_x, seed).is_zero() ||
          !zero_test(substitute(*bt, "t", tr.phi) - beta_x, seed).is_zero())
        throw EngineError("inconsistent t-parametrized target coefficients");
      target.alpha_t = at;
      target.beta_t = bt;
    }
  }

  if (tr.phi.kind() == Kind::Kernel && tr.phi.kernel_tag() == KernelTag::Tan) {
    Expr k = tr.phi.kernel_arg() / Expr::symbol("x");
    try {
      double kv = evaluate(k, {});
      if (kv != 0.0) {
        double half = std::numbers::pi / (2.0 * std::fabs(kv));
        target.x_domain = std::make_pair(-half, half);
      }
    } catch (const EngineError&) {
      // symbolic k: domain left unspecified
    }
  }
  return target;
}

LinearizeResult linearize(const OdeCoefficients& c, std::uint64_t seed) {
  LinearizationReport report = is_linearizable(c, seed);
  if (!report.verdict) throw NotLinearizableError(std::move(report));

  Expr r = riccati_rhs(c, seed);
  ChiSolution chi = solve_riccati(r, seed);
  if (!chi.closed_form)
    throw UnsupportedChiError(
        "Riccati right-hand side is not constant; no closed-form chi");

  PointTransformation tr;
  tr.chi = chi.chi;
  tr.phi = build_phi(chi.chi, seed);
  tr.psi = build_psi(c, chi.chi, seed);
  tr.omega = compute_omega(c);

  if (zero_test(dx(tr.phi), seed).is_zero())
    throw EngineError("phi is not invertible: phi_x vanishes identically");
  if (zero_test(dy(tr.psi), seed).is_zero())
    throw EngineError("psi_y vanishes identically");

  LinearTarget target = build_linear_target(c, tr, seed);
  return {std::move(tr), std::move(target), std::move(report)};
}

}  // namespace lin4
