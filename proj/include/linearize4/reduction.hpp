#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linearize4/construct.hpp"
#include "linearize4/odemodel.hpp"

namespace lin4 {

class DiscriminantNegativeError : public EngineError {
 public:
  using EngineError::EngineError;
};

class BranchUndefinedError : public EngineError {
 public:
  using EngineError::EngineError;
};

// Constants of the source equation
//   u_tt = (kappa u + gamma u^2)_xx + nu u u_xxxx + mu u_xxtt
//          + alpha u_x u_xxx + beta u_xx^2
// plus the phase velocity D of the traveling-wave ansatz u = H(x - D t).
struct PdeParams {
  Expr alpha, beta, gamma, mu, nu, kappa, D;

  static PdeParams symbolic();
  static PdeParams numeric(double alpha, double beta, double gamma, double mu,
                           double nu, double kappa, double D);
  bool is_numeric() const;
};

struct PdeValues {
  double alpha = 0, beta = 0, gamma = 0, mu = 0, nu = 0, kappa = 0, D = 0;
};

// Numeric view of the parameters; throws EngineError when any is symbolic.
PdeValues values_of(const PdeParams& p);
Bindings bindings_of(const PdeValues& v);

enum class CaseKind { Case1, Case21a, Case21b, Case22, NotLinearizable };
const char* case_name(CaseKind kind);

struct CaseTag {
  CaseKind kind = CaseKind::NotLinearizable;
  // constraint residuals that justified the tag, by name
  std::vector<std::pair<std::string, double>> residuals;
};

struct SolutionDescriptor {
  enum class Kind {
    ExplicitSinusoid,
    ExplicitCubic,
    ImplicitQuadratic,
    LinearTargetOnly
  };
  Kind kind = Kind::ExplicitCubic;
  Expr formula_s;       // u(s) for explicit kinds; the cubic P(s) when implicit
  Expr implicit_shift;  // c in u^2/2 + c u = P(s)
  std::array<double, 4> constants{};
  PdeValues params;
  std::string note;
  std::optional<LinearizeResult> linear;  // filled for LinearTargetOnly
};

// Coefficients of the traveling-wave equation
//   (nu H + mu D^2) H'''' + alpha H' H''' + beta H''^2
//   + (2 gamma H + kappa - D^2) H'' + 2 gamma H'^2 = 0
// divided into the class form (phase renamed x, H renamed y).
OdeCoefficients reduce(const PdeParams& p);

// Direct evaluation of the traveling-wave equation (not via the class form),
// term-scaled; the independent cross-check of `reduce`.
ResidualParts reduced_residual_parts(const PdeValues& v, const JetPoint& jet);
double reduced_ode_residual(const PdeValues& v,
                            const std::function<JetPoint(double)>& profile,
                            const std::vector<double>& grid);

// Numeric case classification with precedence nu = 0, then gamma = 0
// sub-cases, then the gamma != 0 case. Equalities hold within
// |a - b| <= tol * (1 + max(|a|, |b|)).
CaseTag classify(const PdeParams& p, double tol = 1e-9);

// Closed-form solution descriptor for a classified parameter set.
// constants map to (C1, C2, C3, C4) for the sinusoid and (C0, C1, C2, C3)
// for the cubic/implicit families.
SolutionDescriptor closed_form(const CaseTag& tag, const PdeParams& p,
                               const std::array<double, 4>& constants,
                               std::uint64_t seed);

// u at (x, t); the implicit kind resolves the quadratic on the branch with
// nu*u + mu*D^2 > 0.
double evaluate_solution(const SolutionDescriptor& sd, double x, double t);

}  // namespace lin4
