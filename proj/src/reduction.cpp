#include "linearize4/reduction.hpp"

#include <cmath>

namespace lin4 {
namespace {

Expr n(std::int64_t v) { return Expr::number(v); }
Expr from_double(double v) { return Expr::number(rational_from_double(v)); }

bool near(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * (1.0 + std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace

PdeParams PdeParams::symbolic() {
  return {Expr::symbol("alpha"), Expr::symbol("beta"), Expr::symbol("gamma"),
          Expr::symbol("mu"),    Expr::symbol("nu"),   Expr::symbol("kappa"),
          Expr::symbol("D")};
}

PdeParams PdeParams::numeric(double alpha, double beta, double gamma, double mu,
                             double nu, double kappa, double D) {
  return {from_double(alpha), from_double(beta),  from_double(gamma),
          from_double(mu),    from_double(nu),    from_double(kappa),
          from_double(D)};
}

bool PdeParams::is_numeric() const {
  for (const Expr* e : {&alpha, &beta, &gamma, &mu, &nu, &kappa, &D})
    if (!free_symbols(*e).empty()) return false;
  return true;
}

PdeValues values_of(const PdeParams& p) {
  if (!p.is_numeric())
    throw EngineError("parameters must be numeric for this operation");
  return {evaluate(p.alpha, {}), evaluate(p.beta, {}),  evaluate(p.gamma, {}),
          evaluate(p.mu, {}),    evaluate(p.nu, {}),    evaluate(p.kappa, {}),
          evaluate(p.D, {})};
}

Bindings bindings_of(const PdeValues& v) {
  return {{"alpha", v.alpha}, {"beta", v.beta},   {"gamma", v.gamma},
          {"mu", v.mu},       {"nu", v.nu},       {"kappa", v.kappa},
          {"D", v.D}};
}

const char* case_name(CaseKind kind) {
  switch (kind) {
    case CaseKind::Case1: return "Case1";
    case CaseKind::Case21a: return "Case21a";
    case CaseKind::Case21b: return "Case21b";
    case CaseKind::Case22: return "Case22";
    case CaseKind::NotLinearizable: return "NotLinearizable";
  }
  return "?";
}

OdeCoefficients reduce(const PdeParams& p) {
  Expr y = Expr::symbol("y");
  Expr w = p.nu * y + p.mu * pow(p.D, 2);
  OdeCoefficients c = OdeCoefficients::zeros();
  c.a1 = p.alpha / w;
  c.b0 = p.beta / w;
  c.c0 = (n(2) * p.gamma * y + p.kappa - pow(p.D, 2)) / w;
  c.d2 = n(2) * p.gamma / w;
  return c;
}

ResidualParts reduced_residual_parts(const PdeValues& v, const JetPoint& jet) {
  const double terms[] = {
      (v.nu * jet.y + v.mu * v.D * v.D) * jet.y4,
      v.alpha * jet.y1 * jet.y3,
      v.beta * jet.y2 * jet.y2,
      (2.0 * v.gamma * jet.y + v.kappa - v.D * v.D) * jet.y2,
      2.0 * v.gamma * jet.y1 * jet.y1,
  };
  ResidualParts out;
  for (double t : terms) {
    out.value += t;
    out.scale = std::max(out.scale, std::fabs(t));
  }
  return out;
}

double reduced_ode_residual(const PdeValues& v,
                            const std::function<JetPoint(double)>& profile,
                            const std::vector<double>& grid) {
  double worst = 0.0;
  for (double x : grid) {
    JetPoint jet = profile(x);
    if (std::fabs(v.nu * jet.y + v.mu * v.D * v.D) < 1e-12)
      throw DomainError("singular leading coefficient at x=" + std::to_string(x));
    worst = std::max(worst, reduced_residual_parts(v, jet).relative());
  }
  return worst;
}

CaseTag classify(const PdeParams& p, double tol) {
  PdeValues v = values_of(p);
  CaseTag tag;
  auto res = [&](const char* name, double r) {
    tag.residuals.emplace_back(name, std::fabs(r));
  };
  const double d2 = v.D * v.D;
  if (std::fabs(v.nu) <= tol) {
    res("nu", v.nu);
    res("alpha", v.alpha);
    res("beta", v.beta);
    res("gamma", v.gamma);
    bool ok = std::fabs(v.alpha) <= tol && std::fabs(v.beta) <= tol &&
              std::fabs(v.gamma) <= tol;
    tag.kind = ok ? CaseKind::Case1 : CaseKind::NotLinearizable;
    return tag;
  }
  if (std::fabs(v.gamma) <= tol) {
    res("gamma", v.gamma);
    if (std::fabs(v.beta) <= tol) {
      res("beta", v.beta);
      res("alpha", v.alpha);
      res("kappa - D^2", v.kappa - d2);
      bool ok = std::fabs(v.alpha) <= tol && near(v.kappa, d2, tol);
      tag.kind = ok ? CaseKind::Case21a : CaseKind::NotLinearizable;
      return tag;
    }
    if (near(v.beta, 3.0 * v.nu, tol)) {
      res("beta - 3 nu", v.beta - 3.0 * v.nu);
      res("alpha - 4 nu", v.alpha - 4.0 * v.nu);
      res("kappa - D^2", v.kappa - d2);
      bool ok = near(v.alpha, 4.0 * v.nu, tol) && near(v.kappa, d2, tol);
      tag.kind = ok ? CaseKind::Case21b : CaseKind::NotLinearizable;
      return tag;
    }
    res("beta", v.beta);
    res("beta - 3 nu", v.beta - 3.0 * v.nu);
    tag.kind = CaseKind::NotLinearizable;
    return tag;
  }
  const double kappa_req = (2.0 * v.gamma * v.mu + v.nu) * d2 / v.nu;
  res("alpha - 4 nu", v.alpha - 4.0 * v.nu);
  res("beta - 3 nu", v.beta - 3.0 * v.nu);
  res("kappa - (2 gamma mu + nu) D^2 / nu", v.kappa - kappa_req);
  bool ok = near(v.alpha, 4.0 * v.nu, tol) && near(v.beta, 3.0 * v.nu, tol) &&
            near(v.kappa, kappa_req, tol);
  tag.kind = ok ? CaseKind::Case22 : CaseKind::NotLinearizable;
  return tag;
}

SolutionDescriptor closed_form(const CaseTag& tag, const PdeParams& p,
                               const std::array<double, 4>& constants,
                               std::uint64_t seed) {
  if (tag.kind == CaseKind::NotLinearizable)
    throw EngineError("no closed form for a non-linearizable parameter set");

  SolutionDescriptor sd;
  sd.constants = constants;
  sd.params = values_of(p);
  const Expr s = Expr::symbol("s");
  auto cn = [&](int i) { return from_double(constants[static_cast<std::size_t>(i)]); };

  switch (tag.kind) {
    case CaseKind::Case1: {
      sd.kind = SolutionDescriptor::Kind::ExplicitSinusoid;
      const PdeValues& v = sd.params;
      if (v.mu * v.D * v.D == 0.0)
        throw DomainError("mu * D^2 must be nonzero for the oscillatory family");
      double om2 = (v.kappa - v.D * v.D) / (v.mu * v.D * v.D);
      if (std::fabs(om2) <= 1e-14) {
        // frequency degenerates; only the affine part of the kernel remains
        sd.formula_s = cn(1) + cn(2) + cn(3) * s;
        sd.note = "degenerate frequency (kappa = D^2): affine solution";
      } else if (om2 > 0.0) {
        Expr w = from_double(std::sqrt(om2));
        sd.formula_s = cn(0) * Expr::kernel(KernelTag::Sin, w * s) +
                       cn(1) * Expr::kernel(KernelTag::Cos, w * s) + cn(2) +
                       cn(3) * s;
      } else {
        Expr w = from_double(std::sqrt(-om2));
        Expr ep = Expr::kernel(KernelTag::Exp, w * s);
        Expr em = Expr::kernel(KernelTag::Exp, n(-1) * w * s);
        sd.formula_s = cn(0) * (ep - em) / n(2) + cn(1) * (ep + em) / n(2) +
                       cn(2) + cn(3) * s;
        sd.note = "hyperbolic family (negative frequency square); extension "
                  "beyond the oscillatory form";
      }
      break;
    }
    case CaseKind::Case21a:
      sd.kind = SolutionDescriptor::Kind::ExplicitCubic;
      sd.formula_s = cn(0) + cn(1) * s + cn(2) * pow(s, 2) + cn(3) * pow(s, 3);
      break;
    case CaseKind::Case21b: {
      sd.kind = SolutionDescriptor::Kind::ImplicitQuadratic;
      sd.formula_s = cn(0) + cn(1) * s + cn(2) * pow(s, 2) + cn(3) * pow(s, 3);
      sd.implicit_shift = p.D * p.D * p.mu / p.nu;
      break;
    }
    case CaseKind::Case22: {
      sd.kind = SolutionDescriptor::Kind::LinearTargetOnly;
      sd.linear = linearize(reduce(p), seed);
      sd.note = "no closed form; certified through the linear target";
      break;
    }
    case CaseKind::NotLinearizable:
      break;  // unreachable
  }
  return sd;
}

double evaluate_solution(const SolutionDescriptor& sd, double x, double t) {
  const double s = x - sd.params.D * t;
  switch (sd.kind) {
    case SolutionDescriptor::Kind::ExplicitSinusoid:
    case SolutionDescriptor::Kind::ExplicitCubic:
      return evaluate(sd.formula_s, {{"s", s}});
    case SolutionDescriptor::Kind::ImplicitQuadratic: {
      const double P = evaluate(sd.formula_s, {{"s", s}});
      const double c = evaluate(sd.implicit_shift, {});
      const double disc = c * c + 2.0 * P;
      if (disc < 0.0)
        throw DiscriminantNegativeError("discriminant " + std::to_string(disc) +
                                        " < 0 at phase s=" + std::to_string(s));
      const double root = std::sqrt(disc);
      // nu*u + mu*D^2 reduces to +/- nu*sqrt(disc); keep it positive
      const double u = sd.params.nu > 0.0 ? -c + root : -c - root;
      if (std::fabs(sd.params.nu * root) < 1e-12)
        throw BranchUndefinedError("both roots sit on the singular line at s=" +
                                   std::to_string(s));
      return u;
    }
    case SolutionDescriptor::Kind::LinearTargetOnly:
      throw EngineError("linear-target-only descriptor has no pointwise value");
  }
  throw EngineError("unreachable descriptor kind");
}

}  // namespace lin4
