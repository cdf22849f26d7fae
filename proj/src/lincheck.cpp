#include "linearize4/lincheck.hpp"

namespace lin4 {

std::array<Expr, 10> condition_set(const OdeCoefficients& c) {
  auto n = [](std::int64_t v) { return Expr::number(v); };
  auto dx = [](const Expr& e) { return differentiate(e, "x"); };
  auto dy = [](const Expr& e) { return differentiate(e, "y"); };

  const Expr& a1 = c.a1;
  const Expr& a0 = c.a0;
  const Expr& b0 = c.b0;
  const Expr& c2 = c.c2;
  const Expr& c1 = c.c1;
  const Expr& c0 = c.c0;
  const Expr& d4 = c.d4;
  const Expr& d3 = c.d3;
  const Expr& d2 = c.d2;
  const Expr& d1 = c.d1;
  const Expr& d0 = c.d0;

  Expr a1x = dx(a1), a1y = dy(a1);
  Expr a0x = dx(a0), a0y = dy(a0);
  Expr c0x = dx(c0), c0y = dy(c0);
  Expr c1x = dx(c1), c1y = dy(c1);

  std::array<Expr, 10> cond;
  cond[0] = a0y - a1x;
  cond[1] = n(4) * b0 - n(3) * a1;
  cond[2] = n(12) * a1y + n(3) * pow(a1, 2) - n(8) * c2;
  cond[3] = n(12) * a1x + n(3) * a0 * a1 - n(4) * c1;
  cond[4] = n(32) * c0y + n(12) * a0x * a1 - n(16) * c1x +
            n(3) * pow(a0, 2) * a1 - n(4) * a0 * c1;
  cond[5] = n(4) * dy(c2) + a1 * c2 - n(24) * d4;
  cond[6] = n(4) * c1y + a1 * c1 - n(12) * d3;
  cond[7] = n(16) * c1x - n(12) * a0x * a1 - n(3) * pow(a0, 2) * a1 +
            n(4) * a0 * c1 + n(8) * a1 * c0 - n(32) * d2;
  cond[8] = n(192) * dx(d2) + n(36) * a0x * a0 * a1 - n(48) * a0x * c1 -
            n(48) * c0x * a1 - n(288) * dy(d1) + n(9) * pow(a0, 3) * a1 -
            n(12) * pow(a0, 2) * c1 - n(36) * a0 * a1 * c0 + n(48) * a0 * d2 +
            n(32) * c0 * c1;
  // The long mixed-derivative condition; the bracket is transcribed with its
  // nested grouping intact and is cross-checked numerically by the
  // constraint-set oracle in the tests.
  Expr bracket =
      n(3) *
          (((n(3) * a0 * a1 - n(4) * c1) * pow(a0, 2)) +
           n(16) * (n(2) * a1 * d1 + c0 * c1) -
           n(16) * (a1 * c0 - d2) * a0) *
          a0 -
      n(32) * (n(4) * (c1 * d1 - n(2) * c2 * d0 + c0 * d2) +
               (n(3) * a1 * d0 - pow(c0, 2)) * a1) -
      n(96) * dy(d1) * a0 + n(384) * dy(d0) * a1 + n(1536) * dy(dy(d0)) -
      n(16) * (n(3) * a0 * a1 - n(4) * c1) * c0x +
      n(12) * ((n(3) * a0 * a1 - n(4) * c1) * a0 - n(4) * (a1 * c0 - n(4) * d2)) *
          a0x;
  cond[9] = n(384) * dy(dx(d1)) - bracket;
  return cond;
}

LinearizationReport is_linearizable(const OdeCoefficients& c, std::uint64_t seed) {
  auto cond = condition_set(c);
  LinearizationReport report;
  report.verdict = true;
  for (int i = 0; i < 10; ++i) {
    ZeroTest z = zero_test(cond[i], seed + static_cast<std::uint64_t>(i));
    ConditionEntry entry;
    entry.index = i + 1;
    entry.expression = cond[i];
    entry.max_sample_residual = z.max_residual;
    switch (z.status) {
      case ZeroTest::Status::Zero:
        entry.satisfied = true;
        entry.status = z.exact ? "zero (exact)" : "zero (sampled)";
        break;
      case ZeroTest::Status::NonZero:
        entry.satisfied = false;
        entry.status = "nonzero";
        break;
      case ZeroTest::Status::Inconclusive:
        entry.satisfied = false;
        entry.status = "inconclusive";
        break;
    }
    report.verdict = report.verdict && entry.satisfied;
    report.conditions.push_back(std::move(entry));
  }
  return report;
}

}  // namespace lin4
