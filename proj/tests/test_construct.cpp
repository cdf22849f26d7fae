#include <doctest.h>

#include "linearize4/construct.hpp"
#include "linearize4/reduction.hpp"

using namespace lin4;

namespace {

PdeParams tangent_family() {
  PdeParams p = PdeParams::symbolic();
  p.alpha = parse("4*nu");
  p.beta = parse("3*nu");
  p.kappa = parse("(2*gamma*mu + nu)*D^2/nu");
  return p;
}

PdeParams cubic_family() {
  PdeParams p = PdeParams::symbolic();
  p.alpha = Expr::number(0);
  p.beta = Expr::number(0);
  p.gamma = Expr::number(0);
  p.kappa = parse("D^2");
  return p;
}

PdeParams implicit_family() {
  PdeParams p = cubic_family();
  p.alpha = parse("4*nu");
  p.beta = parse("3*nu");
  return p;
}

}  // namespace

TEST_CASE("riccati right-hand side") {
  CHECK(riccati_rhs(reduce(cubic_family()), 3).is_zero());

  Expr r = riccati_rhs(reduce(tangent_family()), 3);
  CHECK(r == parse("2/5*gamma/nu"));

  OdeCoefficients bad = OdeCoefficients::zeros();
  bad.c0 = Expr::symbol("y");
  CHECK_THROWS_AS(riccati_rhs(bad, 3), YDependenceError);
}

TEST_CASE("riccati closed forms per constant sign") {
  ChiSolution zero = solve_riccati(Expr::number(0), 3);
  CHECK(zero.closed_form);
  CHECK(zero.chi.is_zero());

  ChiSolution tang = solve_riccati(parse("2/5*gamma/nu"), 3);
  CHECK(tang.closed_form);
  CHECK(tang.chi ==
        parse("2*sqrt(gamma/(5*nu))*tan(sqrt(gamma/(5*nu))*x)"));

  ChiSolution hyp = solve_riccati(Expr::number(-2), 3);
  CHECK(hyp.closed_form);
  CHECK(hyp.chi == parse("-2*tanh(x)"));
  // substituting back: chi' - chi^2/2 - r must vanish
  Expr back = differentiate(hyp.chi, "x") - pow(hyp.chi, 2) / Expr::number(2) -
              Expr::number(-2);
  CHECK(is_identically_zero(back, 5));

  // non-constant right-hand side: numeric descriptor only
  ChiSolution numeric = solve_riccati(Expr::symbol("x"), 3);
  CHECK_FALSE(numeric.closed_form);
  CHECK(numeric.rhs == Expr::symbol("x"));
}

TEST_CASE("phi from chi with the simplest-solution normalization") {
  CHECK(build_phi(Expr::number(0), 3) == Expr::symbol("x"));

  Expr chi_tan = parse("2*sqrt(gamma/(5*nu))*tan(sqrt(gamma/(5*nu))*x)");
  CHECK(build_phi(chi_tan, 3) == parse("tan(sqrt(gamma/(5*nu))*x)"));

  Expr chi_tanh = parse("-2*tanh(x)");
  Expr phi = build_phi(chi_tanh, 3);
  CHECK(phi == parse("tanh(x)"));
  Expr ratio_check = differentiate(differentiate(phi, "x"), "x") -
                     chi_tanh * differentiate(phi, "x");
  CHECK(is_identically_zero(ratio_check, 5));

  CHECK_THROWS_AS(build_phi(Expr::symbol("x"), 3), UnsupportedChiError);
}

TEST_CASE("psi for the supported coefficient shapes") {
  CHECK(build_psi(OdeCoefficients::zeros(), Expr::number(0), 3) ==
        Expr::symbol("y"));

  Expr psi_quad = build_psi(reduce(implicit_family()), Expr::number(0), 3);
  CHECK(psi_quad == parse("y^2/2 + D^2*mu/nu*y"));

  Expr chi_tan = parse("2*sqrt(gamma/(5*nu))*tan(sqrt(gamma/(5*nu))*x)");
  Expr psi_sec = build_psi(reduce(tangent_family()), chi_tan, 3);
  CHECK(psi_sec ==
        parse("sec(sqrt(gamma/(5*nu))*x)^3*(y^2/2 + D^2*mu/nu*y)"));

  OdeCoefficients bad = OdeCoefficients::zeros();
  bad.a1 = Expr::symbol("y");  // 1/a1 is not linear in y
  CHECK_THROWS_AS(build_psi(bad, Expr::number(0), 3), UnsupportedShapeError);
}

TEST_CASE("psi system residuals vanish for every constructed transformation") {
  for (const PdeParams& p :
       {cubic_family(), implicit_family(), tangent_family()}) {
    OdeCoefficients c = reduce(p);
    Expr r = riccati_rhs(c, 11);
    Expr chi = solve_riccati(r, 11).chi;
    Expr psi = build_psi(c, chi, 11);
    Expr psi_y = differentiate(psi, "y");
    CHECK(is_identically_zero(
        Expr::number(4) * differentiate(psi_y, "y") - psi_y * c.a1, 11));
    CHECK(is_identically_zero(
        Expr::number(4) * differentiate(psi_y, "x") -
            psi_y * (c.a0 + Expr::number(6) * chi),
        11));
  }
}

TEST_CASE("omega evaluates term by term") {
  CHECK(compute_omega(OdeCoefficients::zeros()).is_zero());

  OdeCoefficients constant_c0 = OdeCoefficients::zeros();
  constant_c0.c0 = parse("2*gamma/nu");
  CHECK(compute_omega(constant_c0).is_zero());

  OdeCoefficients linear_a0 = OdeCoefficients::zeros();
  linear_a0.a0 = Expr::symbol("x");
  CHECK(compute_omega(linear_a0) == parse("x^3 + 6*x"));
}

TEST_CASE("target coefficients for the three reduced families") {
  // both polynomial families map to the trivial target
  for (const PdeParams& p : {cubic_family(), implicit_family()}) {
    LinearizeResult lin = linearize(reduce(p), 5);
    CHECK(lin.transform.phi == Expr::symbol("x"));
    CHECK(lin.target.alpha_x.is_zero());
    CHECK(lin.target.beta_x.is_zero());
    REQUIRE(lin.target.alpha_t.has_value());
    CHECK(lin.target.alpha_t->is_zero());
  }

  LinearizeResult lin = linearize(reduce(tangent_family()), 5);
  CHECK(lin.target.alpha_x.is_zero());
  CHECK(lin.target.beta_x == parse("-9*cos(sqrt(gamma/(5*nu))*x)^8"));
  REQUIRE(lin.target.beta_t.has_value());
  CHECK(*lin.target.beta_t == parse("-9*(1 + t^2)^(-4)"));

  // invariance: the t form pulled back through t = phi(x) is the x form
  Expr pulled = substitute(*lin.target.beta_t, "t", lin.transform.phi);
  CHECK(is_identically_zero(pulled - lin.target.beta_x, 5));
}

TEST_CASE("alpha target scales as the inverse cube of phi") {
  OdeCoefficients c = OdeCoefficients::zeros();
  c.d1 = Expr::number(1);  // omega = 8
  PointTransformation tr;
  tr.chi = Expr::number(0);
  tr.phi = Expr::symbol("x");
  tr.psi = Expr::symbol("y");
  tr.omega = compute_omega(c);
  LinearTarget base = build_linear_target(c, tr, 5);
  CHECK(base.alpha_x == Expr::number(1));

  tr.phi = Expr::number(3) * Expr::symbol("x");
  LinearTarget scaled = build_linear_target(c, tr, 5);
  CHECK(scaled.alpha_x == Expr::number(1, 27));
}

TEST_CASE("end-to-end linearize and the negative path") {
  LinearizeResult lin = linearize(reduce(cubic_family()), 5);
  CHECK(lin.transform.phi == Expr::symbol("x"));
  CHECK(lin.transform.psi == Expr::symbol("y"));
  CHECK(lin.transform.omega.is_zero());
  CHECK(lin.target.alpha_x.is_zero());
  CHECK(lin.target.beta_x.is_zero());

  PdeParams bad = PdeParams::numeric(1, 1, 1, 1, 1, 1, 1);
  try {
    linearize(reduce(bad), 5);
    FAIL("expected NotLinearizableError");
  } catch (const NotLinearizableError& err) {
    CHECK_FALSE(err.report().verdict);
    bool any_flagged = false;
    for (const auto& e : err.report().conditions)
      any_flagged = any_flagged || !e.satisfied;
    CHECK(any_flagged);
  }
}
