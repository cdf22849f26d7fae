#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "linearize4/expr.hpp"

namespace lin4 {

// Coefficient functions of the linearizable fourth-order class
//   y'''' + (a1 y' + a0) y''' + b0 y''^2 + (c2 y'^2 + c1 y' + c0) y''
//         + d4 y'^4 + d3 y'^3 + d2 y'^2 + d1 y' + d0 = 0,
// each an expression in the symbols x and y (free family parameters may
// appear as further symbols).
struct OdeCoefficients {
  Expr a1, a0, b0, c2, c1, c0, d4, d3, d2, d1, d0;

  static OdeCoefficients zeros() { return OdeCoefficients{}; }

  std::array<std::pair<const char*, const Expr*>, 11> fields() const {
    return {{{"A1", &a1},
             {"A0", &a0},
             {"B0", &b0},
             {"C2", &c2},
             {"C1", &c1},
             {"C0", &c0},
             {"D4", &d4},
             {"D3", &d3},
             {"D2", &d2},
             {"D1", &d1},
             {"D0", &d0}}};
  }
};

// One evaluation point of a profile and its derivatives up to fourth order.
struct JetPoint {
  double x = 0, y = 0, y1 = 0, y2 = 0, y3 = 0, y4 = 0;
};

struct ResidualParts {
  double value = 0;  // signed residual of the class equation
  double scale = 0;  // largest absolute additive term
  double relative() const { return std::abs(value) / (1.0 + scale); }
};

// Evaluates the class equation on a jet; `params` binds every family
// parameter. Coefficient singularities (denominators within 1e-12 of zero)
// throw DomainError.
ResidualParts class_residual_parts(const OdeCoefficients& c, const JetPoint& jet,
                                   const Bindings& params);

inline double class_residual(const OdeCoefficients& c, const JetPoint& jet,
                             const Bindings& params) {
  return class_residual_parts(c, jet, params).value;
}

// Max over the grid of the term-scaled residual |R| / (1 + max |term|).
double residual_of_profile(const OdeCoefficients& c,
                           const std::function<JetPoint(double)>& profile,
                           const std::vector<double>& grid,
                           const Bindings& params);

}  // namespace lin4
