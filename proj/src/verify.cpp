#include "linearize4/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "linearize4/lincheck.hpp"

namespace lin4 {

void GridSpec::validate() const {
  if (!(x_min < x_max) || !(t_min <= t_max))
    throw EngineError("grid ranges must be ordered");
  if (nx < 16 || nt < 16) throw EngineError("grid counts must be at least 16");
  if (!(margin > 0.0)) throw EngineError("grid margin must be positive");
}

namespace {

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
        a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

}  // namespace

std::vector<double> GridSpec::x_points() const { return linspace(x_min, x_max, nx); }
std::vector<double> GridSpec::t_points() const { return linspace(t_min, t_max, nt); }

namespace {

struct PdeTerms {
  double residual = 0;
  double scale = 0;
};

// u_tt - [kappa u_xx + gamma (u^2)_xx + nu u u_xxxx + mu u_xxtt
//         + alpha u_x u_xxx + beta u_xx^2]
PdeTerms pde_terms(const PdeValues& v, double u, double ux, double uxx,
                   double uxxx, double uxxxx, double utt, double uxxtt) {
  const double terms[] = {
      utt,
      -v.kappa * uxx,
      -v.gamma * (2.0 * ux * ux + 2.0 * u * uxx),
      -v.nu * u * uxxxx,
      -v.mu * uxxtt,
      -v.alpha * ux * uxxx,
      -v.beta * uxx * uxx,
  };
  PdeTerms out;
  for (double t : terms) {
    out.residual += t;
    out.scale = std::max(out.scale, std::fabs(t));
  }
  return out;
}

// s-derivatives of the implicit branch of u^2/2 + c u = P(s).
struct ImplicitJet {
  double u, us, uss, usss, ussss;
};

ImplicitJet implicit_jet(const SolutionDescriptor& sd, double s) {
  const double P = evaluate(sd.formula_s, {{"s", s}});
  const double c = evaluate(sd.implicit_shift, {});
  const double disc = c * c + 2.0 * P;
  if (disc < 0.0)
    throw DiscriminantNegativeError("discriminant < 0 at phase s=" +
                                    std::to_string(s));
  const double root = std::sqrt(disc);
  const double u = sd.params.nu > 0.0 ? -c + root : -c - root;
  const double denom = u + c;  // = +/- sqrt(disc)
  if (std::fabs(sd.params.nu * denom) < 1e-12)
    throw BranchUndefinedError("implicit branch hits the singular line at s=" +
                               std::to_string(s));
  Expr P1e = differentiate(sd.formula_s, "s");
  Expr P2e = differentiate(P1e, "s");
  Expr P3e = differentiate(P2e, "s");
  Expr P4e = differentiate(P3e, "s");
  Bindings b{{"s", s}};
  const double P1 = evaluate(P1e, b), P2 = evaluate(P2e, b);
  const double P3 = evaluate(P3e, b), P4 = evaluate(P4e, b);
  ImplicitJet j{};
  j.u = u;
  j.us = P1 / denom;
  j.uss = (P2 - j.us * j.us) / denom;
  j.usss = (P3 - 3.0 * j.us * j.uss) / denom;
  j.ussss = (P4 - 3.0 * j.uss * j.uss - 4.0 * j.us * j.usss) / denom;
  return j;
}

}  // namespace

double pde_residual(const SolutionDescriptor& sd, const GridSpec& g) {
  g.validate();
  const PdeValues& v = sd.params;
  double worst = 0.0;
  std::size_t used = 0;

  if (sd.kind == SolutionDescriptor::Kind::ExplicitSinusoid ||
      sd.kind == SolutionDescriptor::Kind::ExplicitCubic) {
    // u(x, t) = formula(s) with s = x - D t, differentiated exactly
    Expr u = substitute(sd.formula_s, "s",
                        Expr::symbol("x") -
                            Expr::number(rational_from_double(v.D)) * Expr::symbol("t"));
    Expr ux = differentiate(u, "x");
    Expr uxx = differentiate(ux, "x");
    Expr uxxx = differentiate(uxx, "x");
    Expr uxxxx = differentiate(uxxx, "x");
    Expr ut = differentiate(u, "t");
    Expr utt = differentiate(ut, "t");
    Expr uxxtt = differentiate(differentiate(uxx, "t"), "t");
    for (double x : g.x_points()) {
      for (double t : g.t_points()) {
        Bindings b{{"x", x}, {"t", t}};
        PdeTerms pt = pde_terms(v, evaluate(u, b), evaluate(ux, b),
                                evaluate(uxx, b), evaluate(uxxx, b),
                                evaluate(uxxxx, b), evaluate(utt, b),
                                evaluate(uxxtt, b));
        worst = std::max(worst, std::fabs(pt.residual) / (1.0 + pt.scale));
        ++used;
      }
    }
  } else if (sd.kind == SolutionDescriptor::Kind::ImplicitQuadratic) {
    for (double x : g.x_points()) {
      for (double t : g.t_points()) {
        const double s = x - v.D * t;
        ImplicitJet j = implicit_jet(sd, s);
        if (std::fabs(v.nu * j.u + v.mu * v.D * v.D) < g.margin) continue;
        const double D2 = v.D * v.D;
        PdeTerms pt = pde_terms(v, j.u, j.us, j.uss, j.usss, j.ussss,
                                D2 * j.uss, D2 * j.ussss);
        worst = std::max(worst, std::fabs(pt.residual) / (1.0 + pt.scale));
        ++used;
      }
    }
    if (used == 0)
      throw DomainError("every grid point fell inside the singular margin");
  } else {
    throw EngineError(
        "linear-target-only descriptors are certified through the pullback");
  }
  return worst;
}

namespace {

// Coefficient evaluators for the target equation at a given t.
struct TargetField {
  const LinearTarget& target;
  Bindings params;
  const PointTransformation* tr;
  double x_lo = 0, x_hi = 0;  // inversion bracket when no t form exists

  double coeff(const std::optional<Expr>& t_form, const Expr& x_form,
               double t) const {
    if (t_form) {
      Bindings b = params;
      b["t"] = t;
      return evaluate(*t_form, b);
    }
    if (tr == nullptr)
      throw EngineError("x-parametrized target needs the transformation for "
                        "numeric inversion");
    // phi is monotone on the working interval (phi_x != 0): bisection
    Bindings b = params;
    auto phi_at = [&](double x) {
      b["x"] = x;
      return evaluate(tr->phi, b);
    };
    double lo = x_lo, hi = x_hi;
    double flo = phi_at(lo) - t, fhi = phi_at(hi) - t;
    if (flo * fhi > 0.0)
      throw InterpolationGapError("t outside the invertible range of phi");
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(hi)); ++i) {
      double mid = 0.5 * (lo + hi);
      double fm = phi_at(mid) - t;
      if (flo * fm <= 0.0) {
        hi = mid;
        fhi = fm;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    b["x"] = 0.5 * (lo + hi);
    return evaluate(x_form, b);
  }
  double alpha(double t) const { return coeff(target.alpha_t, target.alpha_x, t); }
  double beta(double t) const { return coeff(target.beta_t, target.beta_x, t); }
};

using State = std::array<double, 4>;

State rk4_rhs(const TargetField& f, double t, const State& y) {
  return {y[1], y[2], y[3], -f.alpha(t) * y[1] - f.beta(t) * y[0]};
}

void rk4_step(const TargetField& f, double& t, State& y, double h) {
  auto axpy = [](const State& a, double c, const State& b) {
    State out;
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] =
        a[static_cast<std::size_t>(i)] + c * b[static_cast<std::size_t>(i)];
    return out;
  };
  State k1 = rk4_rhs(f, t, y);
  State k2 = rk4_rhs(f, t + 0.5 * h, axpy(y, 0.5 * h, k1));
  State k3 = rk4_rhs(f, t + 0.5 * h, axpy(y, 0.5 * h, k2));
  State k4 = rk4_rhs(f, t + h, axpy(y, h, k3));
  for (int i = 0; i < 4; ++i) {
    auto u = static_cast<std::size_t>(i);
    y[u] += h / 6.0 * (k1[u] + 2.0 * k2[u] + 2.0 * k3[u] + k4[u]);
  }
  t += h;
}

struct RawRun {
  std::vector<double> t;
  std::vector<State> y;
};

// Integrates from t0 to both ends with fixed per-side step counts, node t0
// included. Doubling the counts exactly halves the steps, keeping coarse
// node i aligned with fine node 2i for the Richardson comparison.
RawRun run_integration(const TargetField& f, const State& ics, double t0,
                       double t_min, double t_max, long n_back, long n_fwd) {
  auto direction = [&](double target, long steps) {
    std::vector<double> ts;
    std::vector<State> ys;
    double span = target - t0;
    if (steps <= 0 || std::fabs(span) < 1e-300) return std::pair{ts, ys};
    double step = span / static_cast<double>(steps);
    double t = t0;
    State y = ics;
    for (long i = 0; i < steps; ++i) {
      rk4_step(f, t, y, step);
      ts.push_back(t);
      ys.push_back(y);
    }
    return std::pair{ts, ys};
  };
  auto [bt, by] = direction(t_min, n_back);
  auto [ft, fy] = direction(t_max, n_fwd);
  RawRun out;
  out.t.reserve(bt.size() + ft.size() + 1);
  out.y.reserve(bt.size() + ft.size() + 1);
  for (std::size_t i = bt.size(); i-- > 0;) {
    out.t.push_back(bt[i]);
    out.y.push_back(by[i]);
  }
  out.t.push_back(t0);
  out.y.push_back(ics);
  for (std::size_t i = 0; i < ft.size(); ++i) {
    out.t.push_back(ft[i]);
    out.y.push_back(fy[i]);
  }
  return out;
}

}  // namespace

NumericProfile integrate_linear(const LinearTarget& target,
                                const std::array<double, 4>& ics, double t0,
                                double t_min, double t_max, double h0,
                                const Bindings& params,
                                const PointTransformation* tr, double rel_tol) {
  if (!(t_min <= t0 && t0 <= t_max))
    throw EngineError("t0 must lie inside the integration range");
  TargetField field{target, params, tr};
  if (target.x_domain) {
    field.x_lo = target.x_domain->first + 1e-6;
    field.x_hi = target.x_domain->second - 1e-6;
  } else {
    field.x_lo = -64.0;
    field.x_hi = 64.0;
  }

  long n_back = t0 > t_min
                    ? std::max(1L, static_cast<long>(std::ceil((t0 - t_min) / h0)))
                    : 0L;
  long n_fwd = t_max > t0
                   ? std::max(1L, static_cast<long>(std::ceil((t_max - t0) / h0)))
                   : 0L;
  RawRun coarse = run_integration(field, ics, t0, t_min, t_max, n_back, n_fwd);
  for (int halving = 0; halving < 20; ++halving) {
    n_back *= 2;
    n_fwd *= 2;
    RawRun fine = run_integration(field, ics, t0, t_min, t_max, n_back, n_fwd);
    // coarse node i corresponds to fine node 2i
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < coarse.t.size(); ++i) {
      diff = std::max(diff, std::fabs(coarse.y[i][0] - fine.y[2 * i][0]));
      scale = std::max(scale, std::fabs(fine.y[2 * i][0]));
    }
    if (diff <= rel_tol * (1.0 + scale)) {
      NumericProfile prof;
      prof.abscissae = fine.t;
      std::size_t m = fine.t.size();
      prof.value.resize(m);
      prof.d1.resize(m);
      prof.d2.resize(m);
      prof.d3.resize(m);
      prof.d4.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        prof.value[i] = fine.y[i][0];
        prof.d1[i] = fine.y[i][1];
        prof.d2[i] = fine.y[i][2];
        prof.d3[i] = fine.y[i][3];
        prof.d4[i] = -field.alpha(fine.t[i]) * fine.y[i][1] -
                     field.beta(fine.t[i]) * fine.y[i][0];
      }
      return prof;
    }
    coarse = std::move(fine);
  }
  throw StepCollapseError("step refinement exceeded 20 halvings");
}

namespace {

// Cubic Hermite interpolation between profile nodes.
double hermite_value(const NumericProfile& p, double t) {
  const auto& xs = p.abscissae;
  if (xs.empty() || t < xs.front() || t > xs.back())
    throw InterpolationGapError("query t=" + std::to_string(t) +
                                " outside the integrated range");
  auto it = std::upper_bound(xs.begin(), xs.end(), t);
  std::size_t hi = std::min<std::size_t>(
      static_cast<std::size_t>(it - xs.begin()), xs.size() - 1);
  std::size_t lo = hi == 0 ? 0 : hi - 1;
  if (lo == hi) return p.value[lo];
  double h = xs[hi] - xs[lo];
  double u = (t - xs[lo]) / h;
  double u2 = u * u, u3 = u2 * u;
  double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
  double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  return h00 * p.value[lo] + h10 * h * p.d1[lo] + h01 * p.value[hi] +
         h11 * h * p.d1[hi];
}

// Fourth-order central stencils on a uniform grid; writes rows
// [3, n-4] of the derivative columns.
void stencil_derivatives(NumericProfile& p) {
  const std::size_t m = p.size();
  const auto& f = p.value;
  double h = p.abscissae[1] - p.abscissae[0];
  p.d1.assign(m, 0.0);
  p.d2.assign(m, 0.0);
  p.d3.assign(m, 0.0);
  p.d4.assign(m, 0.0);
  for (std::size_t i = 3; i + 3 < m; ++i) {
    p.d1[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
    p.d2[i] = (-f[i - 2] + 16 * f[i - 1] - 30 * f[i] + 16 * f[i + 1] - f[i + 2]) /
              (12 * h * h);
    p.d3[i] = (f[i - 3] - 8 * f[i - 2] + 13 * f[i - 1] - 13 * f[i + 1] +
               8 * f[i + 2] - f[i + 3]) /
              (8 * h * h * h);
    p.d4[i] = (-f[i - 3] + 12 * f[i - 2] - 39 * f[i - 1] + 56 * f[i] -
               39 * f[i + 1] + 12 * f[i + 2] - f[i + 3]) /
              (6 * h * h * h * h);
  }
}

}  // namespace

NumericProfile pullback(const PointTransformation& tr,
                        const NumericProfile& target_profile,
                        const PdeValues& params, const GridSpec& g) {
  g.validate();
  constexpr std::uint64_t kSeed = 0x70756c6c;  // internal decision seed
  Expr psi_y = differentiate(tr.psi, "y");
  Expr psi_yy = differentiate(psi_y, "y");
  bool quadratic = !zero_test(psi_yy, kSeed).is_zero();
  if (quadratic && !zero_test(differentiate(psi_yy, "y"), kSeed).is_zero())
    throw EngineError("pullback supports psi at most quadratic in y");

  Bindings base = bindings_of(params);
  const double h = (g.x_max - g.x_min) / (g.nx - 1);
  const std::size_t ext = 3;  // stencil reach
  std::vector<double> xs;
  for (std::size_t i = 0; i < static_cast<std::size_t>(g.nx) + 2 * ext; ++i)
    xs.push_back(g.x_min + (static_cast<double>(i) - static_cast<double>(ext)) * h);

  // exclude x around the poles of phi (cos(kx) = 0 for the tangent shape)
  if (tr.phi.kind() == Kind::Kernel && tr.phi.kernel_tag() == KernelTag::Tan) {
    Expr karg = tr.phi.kernel_arg() / Expr::symbol("x");
    double k = evaluate(karg, base);
    double half_period = std::numbers::pi / std::fabs(k);
    for (double x : xs) {
      double d = std::remainder(std::fabs(k) * x - std::numbers::pi / 2.0,
                                half_period * std::fabs(k));
      if (std::fabs(d) / std::fabs(k) < g.margin)
        throw DomainError("grid reaches within the margin of a pole of phi at x=" +
                          std::to_string(x));
    }
  }

  NumericProfile out;
  out.abscissae = xs;
  out.value.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Bindings b = base;
    b["x"] = xs[i];
    b["y"] = 0.0;
    const double t = evaluate(tr.phi, b);
    const double u = hermite_value(target_profile, t);
    const double m0 = evaluate(tr.psi, b);  // psi(x, 0)
    if (quadratic) {
      const double k = evaluate(psi_yy, b);
      const double c = evaluate(psi_y, b) / k;
      const double rhs = (u - m0) / k;
      const double disc = c * c + 2.0 * rhs;
      if (disc < 0.0)
        throw DiscriminantNegativeError(
            "psi inversion discriminant < 0 at x=" + std::to_string(xs[i]));
      const double root = std::sqrt(disc);
      out.value[i] = params.nu > 0.0 ? -c + root : -c - root;
    } else {
      out.value[i] = (u - m0) / evaluate(psi_y, b);
    }
  }
  stencil_derivatives(out);

  // trim to the requested grid (interior rows carry valid stencils)
  NumericProfile trimmed;
  for (std::size_t i = ext; i + ext < xs.size(); ++i) {
    trimmed.abscissae.push_back(out.abscissae[i]);
    trimmed.value.push_back(out.value[i]);
    trimmed.d1.push_back(out.d1[i]);
    trimmed.d2.push_back(out.d2[i]);
    trimmed.d3.push_back(out.d3[i]);
    trimmed.d4.push_back(out.d4[i]);
  }
  return trimmed;
}

ConditionSample condition_sample_oracle(const OdeCoefficients& c,
                                        const Bindings& params,
                                        std::uint64_t seed) {
  auto conditions = condition_set(c);
  ConditionSample out;
  SampleRng rng(seed);
  for (int point = 0; point < 50; ++point) {
    Bindings b = params;
    b["x"] = rng.sample();
    b["y"] = rng.sample();
    for (int i = 0; i < 10; ++i) {
      try {
        double v = evaluate(conditions[static_cast<std::size_t>(i)], b);
        auto u = static_cast<std::size_t>(i);
        out.max_abs[u] = std::max(out.max_abs[u], std::fabs(v));
      } catch (const DomainError&) {
        ++out.skipped;
      }
    }
  }
  return out;
}

double residual_of_profile(const OdeCoefficients& c, const NumericProfile& prof,
                           const Bindings& params) {
  double worst = 0.0;
  for (std::size_t i = 0; i < prof.size(); ++i)
    worst = std::max(worst,
                     class_residual_parts(c, prof.jet(i), params).relative());
  return worst;
}

double reduced_ode_residual(const PdeValues& v, const NumericProfile& prof) {
  double worst = 0.0;
  for (std::size_t i = 0; i < prof.size(); ++i)
    worst = std::max(worst, reduced_residual_parts(v, prof.jet(i)).relative());
  return worst;
}

double certify_linear_target(const SolutionDescriptor& sd, const GridSpec& g,
                             std::uint64_t seed) {
  if (!sd.linear)
    throw EngineError("descriptor carries no linear target to certify");
  g.validate();
  const PointTransformation& tr = sd.linear->transform;
  const LinearTarget& target = sd.linear->target;
  Bindings params = bindings_of(sd.params);

  // The pullback samples three stencil nodes beyond each grid end; the
  // integration must cover their images under phi.
  const double h = (g.x_max - g.x_min) / (g.nx - 1);
  const double x_lo = g.x_min - 3 * h;
  const double x_hi = g.x_max + 3 * h;
  Bindings b = params;
  b["y"] = 0.0;
  b["x"] = x_lo;
  double t_a = evaluate(tr.phi, b);
  b["x"] = x_hi;
  double t_b = evaluate(tr.phi, b);
  b["x"] = 0.5 * (x_lo + x_hi);
  double t0 = evaluate(tr.phi, b);
  double t_min = std::min(t_a, t_b), t_max = std::max(t_a, t_b);
  const double pad = 1e-9 * (1.0 + std::max(std::fabs(t_min), std::fabs(t_max)));
  t_min -= pad;
  t_max += pad;

  // Seeded initial state near u = 1: keeps the pulled-back branch away from
  // the discriminant zero over the working domain.
  SampleRng rng(seed);
  std::array<double, 4> ics{1.0 + 0.4 * (rng.uniform01() - 0.5),
                            0.2 * (rng.uniform01() - 0.5),
                            0.2 * (rng.uniform01() - 0.5),
                            0.2 * (rng.uniform01() - 0.5)};

  // Step small enough that cubic Hermite interpolation error stays far below
  // the stencil noise floor of the fourth-derivative columns.
  NumericProfile prof = integrate_linear(target, ics, t0, t_min, t_max, 1e-3,
                                         params, &tr);
  NumericProfile pulled = pullback(tr, prof, sd.params, g);
  return reduced_ode_residual(sd.params, pulled);
}

}  // namespace lin4
