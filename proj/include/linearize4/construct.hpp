#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "linearize4/lincheck.hpp"
#include "linearize4/odemodel.hpp"

namespace lin4 {

class NotLinearizableError : public EngineError {
 public:
  explicit NotLinearizableError(LinearizationReport report)
      : EngineError("equation is not linearizable"), report_(std::move(report)) {}
  const LinearizationReport& report() const { return report_; }

 private:
  LinearizationReport report_;
};

// An expression that was required to be independent of y (or x) is not.
class YDependenceError : public EngineError {
 public:
  using EngineError::EngineError;
};

// chi is outside the closed-form table {0, 2k tan(kx), -2k tanh(kx)}.
class UnsupportedChiError : public EngineError {
 public:
  using EngineError::EngineError;
};

// Coefficient shape outside what the quadrature tables cover.
class UnsupportedShapeError : public EngineError {
 public:
  using EngineError::EngineError;
};

// The constructed psi fails one of its defining equations.
class CompatibilityFailureError : public EngineError {
 public:
  using EngineError::EngineError;
};

// The point transformation t = phi(x), u = psi(x, y) together with
// chi = phi_xx / phi_x and the auxiliary expression omega.
struct PointTransformation {
  Expr chi;
  Expr phi;
  Expr psi;
  Expr omega;
};

// Coefficients of the target equation u'''' + alpha(t) u' + beta(t) u = 0,
// parametrized by x (authoritative) and, when phi has a closed inverse,
// also by t.
struct LinearTarget {
  Expr alpha_x;
  Expr beta_x;
  std::optional<Expr> alpha_t;
  std::optional<Expr> beta_t;
  // Open x-interval avoiding phi_x = 0 and kernel poles, when computable.
  std::optional<std::pair<double, double>> x_domain;
};

// Either a closed-form chi or a descriptor for numeric integration of
// chi' = chi^2/2 + r from chi(x0) = 0.
struct ChiSolution {
  bool closed_form = false;
  Expr chi;  // valid when closed_form
  Expr rhs;  // r(x)
  double x0 = 0.0;
};

// Right-hand side r(x) of chi' = chi^2/2 + r built from the coefficients;
// verified independent of y and returned with y eliminated.
Expr riccati_rhs(const OdeCoefficients& c, std::uint64_t seed);

// Closed forms for constant r (0 -> 0; positive -> tangent branch;
// negative -> hyperbolic-tangent branch; symbolic sign defaults to the
// tangent branch). Non-constant r yields a numeric descriptor.
ChiSolution solve_riccati(const Expr& r, std::uint64_t seed);

// phi with phi_xx/phi_x = chi under the simplest-particular-solution
// normalization: 0 -> x, 2k tan(kx) -> tan(kx), -2k tanh(kx) -> tanh(kx).
Expr build_phi(const Expr& chi, std::uint64_t seed);

// Integrates the psi system 4 psi_yy = psi_y a1, 4 psi_xy = psi_y (a0 + 6 chi)
// for the supported coefficient shapes, then verifies the fourth-order
// compatibility equation by the zero test.
Expr build_psi(const OdeCoefficients& c, const Expr& chi, std::uint64_t seed);

// omega = a0^3 - 4 a0 c0 + 8 d1 - 8 c0_x + 6 a0_x a0 + 4 a0_xx.
Expr compute_omega(const OdeCoefficients& c);

// Target coefficients alpha = omega / (8 phi_x^3) and the quartic-bracket
// beta formula; the bracket must be y-independent.
LinearTarget build_linear_target(const OdeCoefficients& c,
                                 const PointTransformation& tr,
                                 std::uint64_t seed);

struct LinearizeResult {
  PointTransformation transform;
  LinearTarget target;
  LinearizationReport report;
};

// End-to-end chain: conditions, Riccati, phi, psi, omega, target.
LinearizeResult linearize(const OdeCoefficients& c, std::uint64_t seed);

}  // namespace lin4
