#include <doctest.h>

#include <cmath>

#include "linearize4/reduction.hpp"

using namespace lin4;

TEST_CASE("reduction produces the class coefficients verbatim") {
  OdeCoefficients c = reduce(PdeParams::symbolic());
  CHECK(c.a1 == parse("alpha/(nu*y + mu*D^2)"));
  CHECK(c.a0.is_zero());
  CHECK(c.b0 == parse("beta/(nu*y + mu*D^2)"));
  CHECK(c.c2.is_zero());
  CHECK(c.c1.is_zero());
  CHECK(c.c0 == parse("(2*gamma*y + kappa - D^2)/(nu*y + mu*D^2)"));
  CHECK(c.d4.is_zero());
  CHECK(c.d3.is_zero());
  CHECK(c.d2 == parse("2*gamma/(nu*y + mu*D^2)"));
  CHECK(c.d1.is_zero());
  CHECK(c.d0.is_zero());
}

TEST_CASE("reduction degenerate parameter slots normalize away") {
  PdeParams p = PdeParams::symbolic();
  p.gamma = Expr::number(0);
  p.kappa = parse("D^2");
  OdeCoefficients c = reduce(p);
  CHECK(c.c0.is_zero());
  CHECK(c.d2.is_zero());

  PdeParams q = PdeParams::symbolic();
  q.nu = Expr::number(0);
  CHECK(reduce(q).a1 == parse("alpha/(mu*D^2)"));
}

TEST_CASE("direct traveling-wave residual equals the class form scaled by the leading coefficient") {
  PdeValues v{1.3, -0.7, 0.4, 1.1, 0.9, 0.6, 1.2};
  PdeParams p = PdeParams::numeric(v.alpha, v.beta, v.gamma, v.mu, v.nu,
                                   v.kappa, v.D);
  OdeCoefficients c = reduce(p);
  SampleRng rng(515);
  for (int i = 0; i < 50; ++i) {
    JetPoint jet{rng.sample(), rng.sample(), rng.sample(),
                 rng.sample(), rng.sample(), rng.sample()};
    double lead = v.nu * jet.y + v.mu * v.D * v.D;
    if (std::fabs(lead) < 1e-3) continue;
    double direct = reduced_residual_parts(v, jet).value;
    double via_class = lead * class_residual(c, jet, {});
    CHECK(std::fabs(direct - via_class) <=
          1e-12 * (1.0 + std::max(std::fabs(direct), std::fabs(via_class))));
  }
}

TEST_CASE("oscillatory profiles satisfy the traveling-wave equation directly") {
  PdeValues v{0, 0, 0, 1, 0, 2, 1};  // frequency 1
  auto sine = [](double x) {
    return JetPoint{x, std::sin(x), std::cos(x), -std::sin(x), -std::cos(x),
                    std::sin(x)};
  };
  std::vector<double> grid;
  for (int i = 0; i < 200; ++i) grid.push_back(-3.0 + 6.0 * i / 199.0);
  CHECK(reduced_ode_residual(v, sine, grid) < 1e-10);
}

TEST_CASE("constant profiles solve the degenerate equation") {
  PdeValues v{0.5, 0.25, 0.0, 1.0, 1.0, 1.0, 1.0};  // gamma = 0, kappa = D^2
  auto constant = [](double x) { return JetPoint{x, 0.7, 0, 0, 0, 0}; };
  std::vector<double> grid{-1.0, 0.0, 1.0, 0.5, -0.5, 0.25, 0.75, -0.25,
                           1.5,  -1.5, 2.0, -2.0, 0.1, -0.1, 0.9, -0.9};
  CHECK(reduced_ode_residual(v, constant, grid) == 0.0);
}

TEST_CASE("classification of the four families and the negative default") {
  CHECK(classify(PdeParams::numeric(0, 0, 0, 1, 0, 2, 1)).kind == CaseKind::Case1);
  CHECK(classify(PdeParams::numeric(0, 0, 0, 1, 1, 1, 1)).kind ==
        CaseKind::Case21a);  // nu != 0 takes precedence over the oscillatory tag
  CHECK(classify(PdeParams::numeric(4, 3, 0, 1, 1, 1, 1)).kind ==
        CaseKind::Case21b);
  CHECK(classify(PdeParams::numeric(4, 3, 1, 1, 1, 3, 1)).kind ==
        CaseKind::Case22);
  CHECK(classify(PdeParams::numeric(1, 1, 1, 1, 1, 1, 1)).kind ==
        CaseKind::NotLinearizable);
  CHECK_THROWS_AS(classify(PdeParams::symbolic()), EngineError);
}

TEST_CASE("single-constraint perturbations flip the tag") {
  struct Probe {
    std::array<double, 7> base;
    int slot;
  };
  // perturb one constrained entry of each family by 1e-3
  const Probe probes[] = {
      {{0, 0, 0, 1, 0, 2, 1}, 0},  // alpha in the oscillatory family
      {{0, 0, 0, 1, 0, 2, 1}, 2},  // gamma
      {{0, 0, 0, 1, 1, 1, 1}, 5},  // kappa in the cubic family
      {{4, 3, 0, 1, 1, 1, 1}, 0},  // alpha in the implicit family
      {{4, 3, 0, 1, 1, 1, 1}, 1},  // beta
      {{4, 3, 1, 1, 1, 3, 1}, 1},  // beta in the tangent family
      {{4, 3, 1, 1, 1, 3, 1}, 5},  // kappa
  };
  for (const Probe& probe : probes) {
    auto v = probe.base;
    PdeParams clean =
        PdeParams::numeric(v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
    CHECK(classify(clean).kind != CaseKind::NotLinearizable);
    v[static_cast<std::size_t>(probe.slot)] += 1e-3;
    PdeParams bumped =
        PdeParams::numeric(v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
    CHECK(classify(bumped).kind == CaseKind::NotLinearizable);
  }
}

TEST_CASE("closed forms reproduce the printed solution families") {
  // oscillatory: u = sin(x - t) for kappa = 2, D = mu = 1
  CaseTag t1 = classify(PdeParams::numeric(0, 0, 0, 1, 0, 2, 1));
  SolutionDescriptor s1 =
      closed_form(t1, PdeParams::numeric(0, 0, 0, 1, 0, 2, 1), {1, 0, 0, 0}, 5);
  CHECK(evaluate_solution(s1, 0.7, 0.2) == doctest::Approx(std::sin(0.5)));

  // cubic: u = 1 + (x - t)^3
  CaseTag t2 = classify(PdeParams::numeric(0, 0, 0, 1, 1, 1, 1));
  SolutionDescriptor s2 =
      closed_form(t2, PdeParams::numeric(0, 0, 0, 1, 1, 1, 1), {1, 0, 0, 1}, 5);
  CHECK(evaluate_solution(s2, 2.0, 0.0) == doctest::Approx(9.0));

  // implicit: u^2/2 + u = x - t on the branch u > -1
  CaseTag t3 = classify(PdeParams::numeric(4, 3, 0, 1, 1, 1, 1));
  SolutionDescriptor s3 =
      closed_form(t3, PdeParams::numeric(4, 3, 0, 1, 1, 1, 1), {0, 1, 0, 0}, 5);
  CHECK(evaluate_solution(s3, 4.0, 0.0) == doctest::Approx(2.0));

  // discriminant failure: P = -1 with shift 1
  SolutionDescriptor s4 =
      closed_form(t3, PdeParams::numeric(4, 3, 0, 1, 1, 1, 1), {-1, 0, 0, 0}, 5);
  CHECK_THROWS_AS(evaluate_solution(s4, 0.0, 0.0), DiscriminantNegativeError);
}

TEST_CASE("degenerate and hyperbolic oscillatory branches") {
  // kappa = D^2 degenerates the frequency: affine solution, flagged
  CaseTag tag = classify(PdeParams::numeric(0, 0, 0, 1, 0, 1, 1));
  SolutionDescriptor affine =
      closed_form(tag, PdeParams::numeric(0, 0, 0, 1, 0, 1, 1), {1, 2, 3, 4}, 5);
  CHECK(affine.note.find("degenerate") != std::string::npos);
  CHECK(evaluate_solution(affine, 1.0, 0.0) == doctest::Approx(2 + 3 + 4));

  // kappa < D^2: hyperbolic family, flagged as an extension
  CaseTag tag2 = classify(PdeParams::numeric(0, 0, 0, 1, 0, 0.5, 1));
  SolutionDescriptor hyp = closed_form(
      tag2, PdeParams::numeric(0, 0, 0, 1, 0, 0.5, 1), {1, 0, 0, 0}, 5);
  CHECK(hyp.note.find("hyperbolic") != std::string::npos);
  double w = std::sqrt(0.5);
  CHECK(evaluate_solution(hyp, 1.0, 0.0) == doctest::Approx(std::sinh(w)));
}

TEST_CASE("implicit branch keeps the leading coefficient positive") {
  // negative nu picks the other quadratic root
  PdeParams p = PdeParams::numeric(-4, -3, 0, 1, -1, 1, 1);
  CHECK(classify(p).kind == CaseKind::Case21b);
  SolutionDescriptor sd = closed_form(classify(p), p, {0, 1, 0, 0}, 5);
  double u = evaluate_solution(sd, 4.0, 0.0);
  PdeValues v = values_of(p);
  CHECK(v.nu * u + v.mu * v.D * v.D > 0.0);
}
