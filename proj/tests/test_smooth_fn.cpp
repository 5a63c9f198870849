#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "distrode/expr.hpp"
#include "distrode/smooth_fn.hpp"
#include "helpers.hpp"

using namespace distrode;
using testutil::close;

TEST_CASE("parse basic expressions") {
  CHECK(evaluate(parse_expr("sin(x)"), 1.3) == std::sin(Scalar(1.3)));
  CHECK(evaluate(parse_expr("0.5*x^2 + 1"), 2.0) == Scalar(3.0));
  CHECK(evaluate(parse_expr("cos(x)"), 0.0) == Scalar(1.0));
  CHECK(evaluate(parse_expr("x^2 - 1"), 2.0) == Scalar(3.0));
  CHECK(evaluate(parse_expr("-x"), 2.0) == Scalar(-2.0));
  CHECK(evaluate(parse_expr("2^3"), 0.0) == Scalar(8.0));
  CHECK(evaluate(parse_expr("1.5e2"), 0.0) == Scalar(150.0));
  CHECK(evaluate(parse_expr("exp(-(x))"), 1.0) == std::exp(Scalar(-1.0)));
}

TEST_CASE("imaginary literals") {
  Scalar v = evaluate(parse_expr("(1.5+2i)*x"), 2.0);
  CHECK(v == Scalar(3.0, 4.0));
  CHECK(evaluate(parse_expr("2.5i"), 0.0) == Scalar(0.0, 2.5));
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(parse_expr("sin(x"), ParseError);
  try {
    parse_expr("sin(x");
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
  }
  try {
    parse_expr("foo(x)");
  } catch (const ParseError& e) {
    CHECK(e.offset == 0);
  }
  CHECK_THROWS_AS(parse_expr("1 + "), ParseError);
  CHECK_THROWS_AS(parse_expr("x^y"), ParseError);
}

TEST_CASE("differentiate") {
  auto dsin = differentiate(parse_expr("sin(x)"), 1);
  for (double x : {-1.0, 0.0, 0.7})
    CHECK(close(evaluate(dsin, x), std::cos(Scalar(x)), 1e-15));

  auto d2x3 = differentiate(parse_expr("x^3"), 2);
  CHECK(evaluate(d2x3, 1.5) == Scalar(9.0));

  auto d3 = differentiate(parse_expr("exp(2*x)"), 3);
  for (double x : {-0.5, 0.25})
    CHECK(close(evaluate(d3, x), 8.0 * std::exp(Scalar(2 * x)), 1e-14));

  // k = 0 returns the expression unchanged.
  auto e = parse_expr("x^2 + sin(x)");
  CHECK(evaluate(differentiate(e, 0), 0.3) == evaluate(e, 0.3));
}

TEST_CASE("division by zero is an error, not NaN") {
  CHECK_THROWS_AS(evaluate(parse_expr("1/x"), 0.0), EvalError);
  CHECK_THROWS_AS(evaluate(parse_expr("x^-1"), 0.0), EvalError);
  CHECK(evaluate(parse_expr("1/x"), 2.0) == Scalar(0.5));
}

TEST_CASE("eval_jet examples") {
  auto j = eval_jet(parse_expr("sin(x)"), 0.0, 3);
  CHECK(j[0] == Scalar(0));
  CHECK(j[1] == Scalar(1));
  CHECK(j[2] == Scalar(0));
  CHECK(j[3] == Scalar(-1));

  j = eval_jet(parse_expr("x^2"), 1.0, 2);
  CHECK(j[0] == Scalar(1));
  CHECK(j[1] == Scalar(2));
  CHECK(j[2] == Scalar(2));

  j = eval_jet(parse_expr("exp(x)"), 0.0, 1);
  CHECK(j[0] == Scalar(1));
  CHECK(j[1] == Scalar(1));
}

TEST_CASE("combine") {
  auto a = combine(CombineOp::Add, {SmoothExpr::var(), SmoothExpr::constant(1)});
  CHECK(evaluate(a, 2.0) == Scalar(3.0));
  auto m = combine(CombineOp::Mul,
                   {SmoothExpr::sin(SmoothExpr::var()), SmoothExpr::sin(SmoothExpr::var())});
  CHECK(close(evaluate(m, 0.4), std::pow(std::sin(0.4), 2), 1e-15));
  auto s = scale(Scalar(2), SmoothExpr::var().pow(2));
  CHECK(evaluate(s, 3.0) == Scalar(18.0));
}

TEST_CASE("derivative matches central finite differences") {
  testutil::ExprGen gen(20240817);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    SmoothExpr e = gen.gen();
    SmoothExpr de = differentiate(e, 1);
    double x = gen.sample_x();
    const double h = 1e-5;
    Scalar fd;
    Scalar v;
    try {
      fd = (evaluate(e, x + h) - evaluate(e, x - h)) / (2 * h);
      v = evaluate(de, x);
    } catch (const EvalError&) {
      continue;
    }
    CHECK(std::abs(v - fd) <= 1e-6 * (1.0 + std::abs(v)));
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("eval_jet agrees with repeated differentiation") {
  testutil::ExprGen gen(7);
  for (int trial = 0; trial < 60; ++trial) {
    SmoothExpr e = gen.gen();
    double x = gen.sample_x();
    const int K = 5;
    auto j = eval_jet(e, x, K);
    SmoothExpr d = e;
    for (int k = 0; k <= K; ++k) {
      CHECK(close(j[k], evaluate(d, x), 1e-9));
      d = d.derivative();
    }
  }
}

TEST_CASE("printer round-trips through the parser") {
  testutil::ExprGen gen(99);
  for (int trial = 0; trial < 100; ++trial) {
    SmoothExpr e = gen.gen();
    SmoothExpr r = parse_expr(e.str());
    for (int s = 0; s < 16; ++s) {
      double x = -5.0 + 10.0 * s / 15.0;
      Scalar a = evaluate(e, x), b = evaluate(r, x);
      CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
    }
  }
  // also with complex literals
  SmoothExpr c = SmoothExpr::constant(Scalar(-1.25, 3.5)) * SmoothExpr::var() +
                 SmoothExpr::constant(Scalar(0, -2));
  SmoothExpr rc = parse_expr(c.str());
  CHECK(evaluate(c, 1.7) == evaluate(rc, 1.7));
}

TEST_CASE("smooth_fn combinators expose consistent jets") {
  auto f = make_fn(parse_expr("sin(x)"));
  auto g = make_fn(parse_expr("x^2 + 1"));
  auto p = fn_mul(f, g);
  auto sum = fn_add(f, g);
  double x = 0.8;
  auto jf = f->jet(x, 4), jg = g->jet(x, 4), jp = p->jet(x, 4), js = sum->jet(x, 4);
  // Leibniz at order 2: (fg)'' = f''g + 2f'g' + fg''
  CHECK(close(jp[2], jf[2] * jg[0] + 2.0 * jf[1] * jg[1] + jf[0] * jg[2], 1e-13));
  CHECK(close(js[3], jf[3] + jg[3], 1e-13));
  CHECK(close(p->derivative()->eval(x), jp[1], 1e-12));
}

TEST_CASE("antiderivative fn integrates and differentiates back") {
  auto f = make_fn(parse_expr("cos(x)"));
  auto F = fn_antiderivative(f, 0.0, Scalar(0));
  CHECK(close(F->eval(1.3), std::sin(Scalar(1.3)), 1e-10));
  CHECK(close(F->eval(-2.0), std::sin(Scalar(-2.0)), 1e-10));
  auto j = F->jet(0.5, 3);
  CHECK(close(j[0], std::sin(Scalar(0.5)), 1e-10));
  CHECK(close(j[1], std::cos(Scalar(0.5)), 1e-13));
  CHECK(close(j[2], -std::sin(Scalar(0.5)), 1e-13));
  CHECK(F->derivative() == f);
}
