#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "distrode/quadrature.hpp"
#include "distrode/regularize.hpp"
#include "helpers.hpp"

using namespace distrode;
using testutil::close;

namespace {

TestFunction bump(double c, double w) {
  std::ostringstream e;
  e << "exp(-1/(1 - ((x - " << c << ")/" << w << ")^2))";
  return {parse_expr(e.str()), {c - w, c + w}};
}

// Quadrature of the regularization against a plain function, split at the
// collar edges.
Scalar integrate_reg(const RegularizedFn& reg, double lo, double hi,
                     const std::function<Scalar(double)>& weight) {
  return integrate_split([&](double x) { return reg.eval(x) * weight(x); }, lo,
                         hi, reg.kinks());
}

}  // namespace

TEST_CASE("bump kernel: mass, support, symmetry") {
  BumpKernel k = bump_mollifier(0.5, 0.25);
  // unit mass, checked by independent quadrature
  Scalar mass = integrate([&](double x) { return Scalar(k.eval(x)); },
                          0.5 - 0.25, 0.5 + 0.25);
  CHECK(std::abs(mass - Scalar(1)) < 1e-10);
  // profile integral of exp(-1/(1-t^2)) is about 0.443994
  CHECK(close(BumpKernel::profile_mass(), 0.4439938161680786, 1e-9));
  // support
  CHECK(k.eval(0.5 + 1.01 * 0.25) == 0.0);
  CHECK(k.eval(0.5 - 1.01 * 0.25) == 0.0);
  // symmetry
  for (double d : {0.05, 0.13, 0.21})
    CHECK(k.eval(0.5 + d) == doctest::Approx(k.eval(0.5 - d)).epsilon(1e-13));
  // jets match finite differences of eval
  auto j = k.jet(0.58, 2);
  double h = 1e-6;
  CHECK(close(j[1], (k.eval(0.58 + h) - k.eval(0.58 - h)) / (2 * h), 1e-5));
}

TEST_CASE("regularized Heaviside obeys (C1) outside the collar") {
  double eps = 1.0 / 16;
  RegularizedFn plus = regularize(DistA::heaviside(), eps, RegSide::Plus);
  // F_eps^+(x) = F_eps(x - eps): collar maps to [0, 2 eps]
  CHECK(plus.eval(-eps / 2) == Scalar(0));
  CHECK(plus.eval(3 * eps) == Scalar(1));
  RegularizedFn minus = regularize(DistA::heaviside(), eps, RegSide::Minus);
  CHECK(minus.eval(eps / 2) == Scalar(1));
  CHECK(minus.eval(-3 * eps) == Scalar(0));

  // exact agreement with the shifted base outside the collar
  DistA hsin = star(DistA::heaviside(), DistA::smooth(parse_expr("sin(x)")));
  RegularizedFn r = regularize(hsin, eps, RegSide::Plus);
  for (double x : {-1.0, -0.3, 0.7, 2.0}) {
    double y = x - eps;
    if (y > -eps && y < eps) continue;
    Scalar base = y >= 0 ? std::sin(Scalar(y)) : Scalar(0);
    CHECK(std::abs(r.eval(x) - base) <= 1e-14);
  }
}

TEST_CASE("regularized delta has unit mass; delta' has moment -1") {
  double eps = 1.0 / 32;
  for (RegSide side : {RegSide::Plus, RegSide::Minus}) {
    RegularizedFn rd = regularize(DistA::dirac(0.0), eps, side);
    Scalar mass = integrate_reg(rd, -1.0, 1.0, [](double) { return Scalar(1); });
    CHECK(std::abs(mass - Scalar(1)) < 1e-8);

    RegularizedFn rdp = regularize(DistA::dirac(0.0, 1), eps, side);
    Scalar moment = integrate_reg(rdp, -1.0, 1.0, [](double x) { return Scalar(x); });
    CHECK(std::abs(moment - Scalar(-1)) < 1e-6);
  }
}

TEST_CASE("regularize rejects eps wider than half the breakpoint gap") {
  DistA two = add(DistA::dirac(0.0), DistA::dirac(0.5));
  CHECK_THROWS_AS(regularize(two, 0.3, RegSide::Plus), ValidationError);
  CHECK_NOTHROW(regularize(two, 0.2, RegSide::Plus));
}

TEST_CASE("distributional convergence of the families") {
  std::vector<DistA> fixtures = {
      DistA::heaviside(), DistA::dirac(0.0), DistA::dirac(0.0, 1),
      star(DistA::heaviside(), DistA::smooth(parse_expr("sin(x)")))};
  std::vector<TestFunction> tests = {bump(0, 1.5), bump(0.3, 2.0),
                                     bump(-0.4, 2.5), bump(0.7, 1.8),
                                     bump(-1.1, 2.2)};
  double eps = std::pow(2.0, -10);
  for (const auto& F : fixtures) {
    for (const auto& t : tests) {
      Scalar want = pair_with_test(F, t.expr, t.support);
      for (RegSide side : {RegSide::Plus, RegSide::Minus}) {
        RegularizedFn reg = regularize(F, eps, side);
        Scalar got = integrate_split(
            [&](double x) { return reg.eval(x) * evaluate(t.expr, x); },
            t.support.lo, t.support.hi, reg.kinks());
        CHECK(std::abs(got - want) < 1e-3);
      }
    }
  }
}

TEST_CASE("weak residual: smooth F converges at first order in eps") {
  // The definition shifts even a smooth family by eps, so the residual is
  // O(eps), vanishing in the limit.
  DistA F = DistA::smooth(parse_expr("sin(x) + 0.5*x"));
  DistA psi = add(DistA::dirac(0.0, 1), DistA::heaviside());
  TestFunction t = bump(0, 2.0);
  double r = weak_residual(F, psi, t, 1.0 / 256, RegSide::Plus);
  double r2 = weak_residual(F, psi, t, 1.0 / 1024, RegSide::Plus);
  CHECK(r2 < r);
  CHECK(r2 < 0.3 * r);  // at least first-order decay
  CHECK(r2 < 1e-2);
}

TEST_CASE("weak residual: H against delta on both sides") {
  TestFunction t = bump(0, 2.0);
  // H * delta = 0: the plus-side family sees the left (zero) piece exactly
  double rp = weak_residual(DistA::heaviside(), DistA::dirac(0.0), t, 1.0 / 64,
                            RegSide::Plus);
  CHECK(rp < 1e-12);
  // delta * H = delta: the minus side converges to <delta, t>
  double rm = weak_residual(DistA::heaviside(), DistA::dirac(0.0), t, 1.0 / 64,
                            RegSide::Minus);
  CHECK(rm < 1e-12);
}

TEST_CASE("convergence report decreases along the schedule") {
  std::vector<double> schedule;
  for (int k = 3; k <= 10; ++k) schedule.push_back(std::pow(2.0, -k));
  TestFunction t = bump(0.1, 2.0);

  auto rows = convergence_report(DistA::heaviside(), DistA::dirac(0.0, 1), t,
                                 schedule, RegSide::Plus);
  REQUIRE(rows.size() == schedule.size());
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].residual <= rows[i - 1].residual + 1e-12);
  CHECK(rows.back().residual < 1e-3);

  // delta against H converges to <star(delta, H), t> = t(0)-weighted;
  // the coarsest steps are pre-asymptotic, the tail is monotone
  auto rows2 = convergence_report(DistA::dirac(0.0), DistA::heaviside(), t,
                                  schedule, RegSide::Plus);
  CHECK(rows2.back().residual < 1e-3);
  CHECK(rows2.back().residual <= rows2.front().residual);
  for (std::size_t i = 2; i < rows2.size(); ++i)
    CHECK(rows2[i].residual <= rows2[i - 1].residual + 1e-12);

  // smooth coefficient: residuals decay monotonically to near zero (the
  // shifted family still differs from F by O(eps) before the limit)
  auto rows3 = convergence_report(DistA::smooth(parse_expr("cos(x)")),
                                  DistA::dirac(0.0), t, schedule, RegSide::Plus);
  for (std::size_t i = 1; i < rows3.size(); ++i)
    CHECK(rows3[i].residual <= rows3[i - 1].residual + 1e-12);
  CHECK(rows3.back().residual <= 1e-5);
}
