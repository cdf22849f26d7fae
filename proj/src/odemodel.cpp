#include "linearize4/odemodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lin4 {

ResidualParts class_residual_parts(const OdeCoefficients& c, const JetPoint& jet,
                                   const Bindings& params) {
  Bindings b = params;
  b["x"] = jet.x;
  b["y"] = jet.y;
  auto ev = [&](const Expr& e) { return evaluate(e, b); };

  const double a1 = ev(c.a1), a0 = ev(c.a0), b0 = ev(c.b0);
  const double c2 = ev(c.c2), c1 = ev(c.c1), c0 = ev(c.c0);
  const double d4 = ev(c.d4), d3 = ev(c.d3), d2 = ev(c.d2);
  const double d1 = ev(c.d1), d0 = ev(c.d0);

  const double terms[] = {
      jet.y4,
      (a1 * jet.y1 + a0) * jet.y3,
      b0 * jet.y2 * jet.y2,
      (c2 * jet.y1 * jet.y1 + c1 * jet.y1 + c0) * jet.y2,
      d4 * jet.y1 * jet.y1 * jet.y1 * jet.y1,
      d3 * jet.y1 * jet.y1 * jet.y1,
      d2 * jet.y1 * jet.y1,
      d1 * jet.y1,
      d0,
  };
  ResidualParts out;
  for (double t : terms) {
    out.value += t;
    out.scale = std::max(out.scale, std::fabs(t));
  }
  return out;
}

double residual_of_profile(const OdeCoefficients& c,
                           const std::function<JetPoint(double)>& profile,
                           const std::vector<double>& grid,
                           const Bindings& params) {
  double worst = 0.0;
  for (double x : grid) {
    try {
      worst = std::max(worst, class_residual_parts(c, profile(x), params).relative());
    } catch (const DomainError& err) {
      throw DomainError(std::string(err.what()) + " at grid point x=" +
                        std::to_string(x));
    }
  }
  return worst;
}

}  // namespace lin4
