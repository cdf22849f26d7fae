#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "linearize4/construct.hpp"
#include "linearize4/reduction.hpp"

namespace lin4 {

class StepCollapseError : public EngineError {
 public:
  using EngineError::EngineError;
};

class InterpolationGapError : public EngineError {
 public:
  using EngineError::EngineError;
};

struct GridSpec {
  double x_min = -2.0, x_max = 2.0;
  int nx = 100;
  double t_min = 0.0, t_max = 1.0;
  int nt = 20;
  double margin = 0.1;  // excluded distance around singular lines

  void validate() const;
  std::vector<double> x_points() const;
  std::vector<double> t_points() const;
};

// Sampled profile with derivative columns up to order four, either
// integrator-exact or filled by finite-difference stencils.
struct NumericProfile {
  std::vector<double> abscissae;  // strictly increasing
  std::vector<double> value, d1, d2, d3, d4;
  std::size_t size() const { return abscissae.size(); }
  JetPoint jet(std::size_t i) const {
    return {abscissae[i], value[i], d1[i], d2[i], d3[i], d4[i]};
  }
};

// Residual of the source equation on an (x, t) grid. Partials of explicit
// solutions come from exact symbolic differentiation; the implicit kind uses
// implicit differentiation of u^2/2 + c u = P(s). Grid points within
// `margin` of the singular line nu*u + mu*D^2 = 0 are excluded.
double pde_residual(const SolutionDescriptor& sd, const GridSpec& g);

// Classic fixed-step fourth-order Runge-Kutta on the companion system of
// u'''' + alpha(t) u' + beta(t) u = 0, integrating from t0 across
// [t_min, t_max]. Step halving continues until successive runs agree to
// `rel_tol` (at most 20 halvings). Coefficients come from the t-parametrized
// target when present, otherwise from the x form through numeric inversion
// of phi (which requires `tr`).
NumericProfile integrate_linear(const LinearTarget& target,
                                const std::array<double, 4>& ics, double t0,
                                double t_min, double t_max, double h0,
                                const Bindings& params = {},
                                const PointTransformation* tr = nullptr,
                                double rel_tol = 1e-8);

// Maps a target-equation profile back through t = phi(x), u = psi(x, y):
// solves psi(x, y) = u(phi(x)) for y on the branch nu*y + mu*D^2 > 0 and
// fills derivative columns with fourth-order central stencils (the returned
// grid is the requested x grid; sampling extends three nodes beyond each end
// to feed the stencils). Interpolation between integrator nodes is cubic
// Hermite using the stored first derivatives.
NumericProfile pullback(const PointTransformation& tr,
                        const NumericProfile& target_profile,
                        const PdeValues& params, const GridSpec& g);

// Brute-force numeric evaluation of the ten linearizability conditions at 50
// seeded (x, y) points; the independent oracle for the symbolic verdicts.
struct ConditionSample {
  std::array<double, 10> max_abs{};
  int skipped = 0;  // condition evaluations skipped for singularity
};
ConditionSample condition_sample_oracle(const OdeCoefficients& c,
                                        const Bindings& params,
                                        std::uint64_t seed);

// Term-scaled class-equation residual over a stored profile.
double residual_of_profile(const OdeCoefficients& c, const NumericProfile& prof,
                           const Bindings& params);

// Term-scaled traveling-wave equation residual over a stored profile.
double reduced_ode_residual(const PdeValues& v, const NumericProfile& prof);

// Full certification of a linear-target-only descriptor: integrate the
// target equation from a seeded initial state, pull the profile back through
// (phi, psi) over the grid, and return the traveling-wave equation residual.
double certify_linear_target(const SolutionDescriptor& sd, const GridSpec& g,
                             std::uint64_t seed);

}  // namespace lin4
