#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "distrode/dist.hpp"
#include "distrode/json_io.hpp"
#include "distrode/quadrature.hpp"
#include "helpers.hpp"

using namespace distrode;
using testutil::close;

namespace {

const SmoothExpr kBump3 = parse_expr("exp(-1/(1 - (x/3)^2))");
const Interval kSupp3{-3.0, 3.0};

// Random algebra elements: pieces from {polynomials of degree <= 3, sin,
// exp}, deltas of order <= 3 at points in {-1, 0, 1}.
class DistGen {
 public:
  explicit DistGen(unsigned seed) : rng_(seed) {}

  FnPtr piece() {
    std::uniform_int_distribution<int> pick(0, 2);
    switch (pick(rng_)) {
      case 0: {
        SmoothExpr x = SmoothExpr::var();
        SmoothExpr e = SmoothExpr::constant(coef());
        e = e + SmoothExpr::constant(coef()) * x;
        e = e + SmoothExpr::constant(coef()) * x.pow(2);
        e = e + SmoothExpr::constant(coef()) * x.pow(3);
        return make_fn(e);
      }
      case 1:
        return make_fn(scale(coef(), SmoothExpr::sin(SmoothExpr::var())));
      default:
        return make_fn(scale(
            coef(), SmoothExpr::exp(SmoothExpr::constant(0.3) * SmoothExpr::var())));
    }
  }

  DistA gen(bool with_deltas = true) {
    std::vector<double> pts = {-1.0, 0.0, 1.0};
    std::vector<double> breaks;
    for (double p : pts)
      if (flip()) breaks.push_back(p);
    std::vector<FnPtr> pieces;
    for (std::size_t i = 0; i <= breaks.size(); ++i) pieces.push_back(piece());
    DistA d = DistA::piecewise(breaks, pieces);
    if (with_deltas) {
      DeltaPart dp;
      std::uniform_int_distribution<int> ord(0, 3);
      for (double p : pts)
        if (flip()) dp.add_term(p, ord(rng_), coef());
      d = add(d, canonicalize(DistA(PiecewisePart{{}, {zero_fn()}}, dp)));
    }
    return d;
  }

  Scalar coef() {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    return Scalar(d(rng_), d(rng_));
  }
  bool flip() {
    std::uniform_int_distribution<int> d(0, 1);
    return d(rng_) == 1;
  }

 private:
  std::mt19937 rng_;
};

}  // namespace

TEST_CASE("canonicalize") {
  // zero-coefficient deltas are dropped
  DeltaPart dp;
  dp.add_term(3.0, 0, Scalar(0));
  DistA h(PiecewisePart{{0.0}, {zero_fn(), one_fn()}}, dp);
  DistA ch = canonicalize(h);
  CHECK(ch.deltas().empty());
  CHECK(ch.breakpoints() == std::vector<double>{0.0});

  // delta points become breakpoints with equal lateral pieces
  DistA d = DistA::dirac(1.0);
  CHECK(d.breakpoints() == std::vector<double>{1.0});
  CHECK(d.pieces().size() == 2);
  CHECK(d.deltas().coef(1.0, 0) == Scalar(1));

  // false breakpoints are permitted
  DistA ones = DistA::piecewise({0.0}, {one_fn(), one_fn()});
  CHECK(ones.breakpoints().size() == 1);
  CHECK(equals(ones, DistA::constant(1), 1e-12));
}

TEST_CASE("refine") {
  DistA h = DistA::heaviside();
  DistA h1 = DistA::piecewise({1.0}, {zero_fn(), one_fn()});
  auto [a, b] = refine(h, h1);
  CHECK(a.breakpoints() == std::vector<double>({0.0, 1.0}));
  CHECK(b.breakpoints() == std::vector<double>({0.0, 1.0}));
  CHECK(equals(a, h, 1e-12));
  CHECK(equals(b, h1, 1e-12));

  auto [c, d] = refine(DistA::dirac(0.0), DistA::smooth(parse_expr("x^2")));
  CHECK(c.breakpoints() == std::vector<double>{0.0});
  CHECK(d.breakpoints() == std::vector<double>{0.0});

  auto [e, f] = refine(h, h);
  CHECK(e.breakpoints() == f.breakpoints());
  CHECK(equals(e, f, 1e-15));
}

TEST_CASE("add and scale") {
  CHECK(equals(add(DistA::heaviside(), DistA::heaviside_minus()),
               DistA::constant(1), 1e-12));
  DistA z = scale(Scalar(0), DistA::dirac(0.0));
  CHECK(z.deltas().empty());
  CHECK(dist_order(z) == 0);

  DistA s = add(DistA::dirac(0.0, 0), DistA::dirac(0.0, 1));
  CHECK(s.deltas().coef(0.0, 0) == Scalar(1));
  CHECK(s.deltas().coef(0.0, 1) == Scalar(1));
}

TEST_CASE("dual_smooth_delta") {
  // x * delta' = -delta
  auto e = dual_smooth_delta(*make_fn(SmoothExpr::var()), 0.0, 1);
  CHECK(e.coef(0.0, 0) == Scalar(-1));
  CHECK(e.coef(0.0, 1) == Scalar(0));

  // 1 * delta^(k) = delta^(k)
  auto id = dual_smooth_delta(*one_fn(), 0.0, 3);
  CHECK(id.coef(0.0, 3) == Scalar(1));
  CHECK(id.terms().size() == 1);

  // psi * delta''' = psi(0) d''' - 3 psi'(0) d'' + 3 psi''(0) d' - psi'''(0) d
  auto psi = make_fn(parse_expr("exp(x) * cos(2*x)"));
  auto j = psi->jet(0.0, 3);
  auto x = dual_smooth_delta(*psi, 0.0, 3);
  CHECK(close(x.coef(0.0, 3), j[0], 1e-14));
  CHECK(close(x.coef(0.0, 2), -3.0 * j[1], 1e-14));
  CHECK(close(x.coef(0.0, 1), 3.0 * j[2], 1e-14));
  CHECK(close(x.coef(0.0, 0), -j[3], 1e-14));
}

TEST_CASE("star product identities are exact") {
  DistA H = DistA::heaviside(), Hm = DistA::heaviside_minus();
  for (int i = 0; i <= 3; ++i) {
    DistA di = DistA::dirac(0.0, i);
    // H * d^(i) = 0 and d^(i) * H_- = 0
    CHECK(star(H, di).deltas().empty());
    CHECK(star(di, Hm).deltas().empty());
    // H_- * d^(i) = d^(i) * H = d^(i)
    CHECK(star(Hm, di).deltas().coef(0.0, i) == Scalar(1));
    CHECK(star(di, H).deltas().coef(0.0, i) == Scalar(1));
    CHECK(star(Hm, di).deltas().terms().size() == 1);
    CHECK(star(di, H).deltas().terms().size() == 1);
  }
  // delta * delta = 0 at arbitrary points and orders
  for (double x0 : {0.0, 1.5})
    for (double x1 : {0.0, -0.5})
      for (int i : {0, 2})
        for (int j : {0, 1}) {
          DistA p = star(DistA::dirac(x0, i), DistA::dirac(x1, j));
          CHECK(p.deltas().empty());
        }
}

TEST_CASE("star of regular elements is the ordinary product") {
  DistA hx = star(DistA::heaviside(), DistA::smooth(SmoothExpr::var()));
  DistA prod = star(hx, hx);
  DistA hx2 = star(DistA::heaviside(), DistA::smooth(SmoothExpr::var().pow(2)));
  CHECK(equals(prod, hx2, 1e-12));
  CHECK(prod.deltas().empty());
}

TEST_CASE("derivative") {
  CHECK(equals(derivative(DistA::heaviside(), 1), DistA::dirac(0.0), 1e-15));
  CHECK(equals(derivative(DistA::dirac(0.0), 2), DistA::dirac(0.0, 2), 1e-15));

  // d/dx (H_- psi_- + H psi_+) = H_- psi_-' + H psi_+' + (psi_+(0)-psi_-(0)) delta
  auto pm = make_fn(parse_expr("cos(x)"));
  auto pp = make_fn(parse_expr("2 + x"));
  DistA f = DistA::piecewise({0.0}, {pm, pp});
  DistA df = derivative(f, 1);
  CHECK(close(df.deltas().coef(0.0, 0), Scalar(1), 1e-15));  // 2 - cos(0)
  DistA expect = DistA::piecewise({0.0}, {make_fn(parse_expr("-(sin(x))")), one_fn()});
  expect = add(expect, DistA::dirac(0.0, 0, Scalar(1)));
  CHECK(equals(df, expect, 1e-12));
}

TEST_CASE("antiderivative") {
  CHECK(equals(antiderivative(DistA::dirac(0.0)), DistA::heaviside(), 1e-10));
  DistA hx = star(DistA::heaviside(), DistA::smooth(SmoothExpr::var()));
  CHECK(equals(antiderivative(DistA::heaviside()), hx, 1e-10));

  // round trip: derivative(antiderivative(F)) = F
  DistGen gen(31337);
  for (int trial = 0; trial < 10; ++trial) {
    DistA f = gen.gen();
    DistA rt = derivative(antiderivative(f), 1);
    CHECK(equals(rt, f, 1e-8));
  }
}

TEST_CASE("restrict_to") {
  DistA dh = add(DistA::dirac(0.0), DistA::heaviside());
  CHECK(equals(restrict_to(dh, {1.0, 2.0}), DistA::constant(1), 1e-14));
  DistGen gen(5);
  DistA f = gen.gen();
  CHECK(equals(restrict_to(f, Interval::whole()), f, 1e-14));
  CHECK(equals(restrict_to(DistA::heaviside(), {-2.0, -1.0}), DistA(), 1e-14));
}

TEST_CASE("sing_supp and dist_order") {
  CHECK(sing_supp(DistA::heaviside()) == std::vector<double>{0.0});
  CHECK(dist_order(DistA::dirac(0.0, 2)) == 3);
  CHECK(dist_order(DistA::heaviside()) == 0);
  CHECK(dist_order(DistA()) == 0);

  auto x2 = make_fn(parse_expr("x^2"));
  DistA fake = DistA::piecewise({0.0}, {x2, make_fn(parse_expr("x^2"))});
  CHECK(sing_supp(fake).empty());

  DistA mix = add(DistA::dirac(1.0, 1), DistA::heaviside());
  auto ss = sing_supp(mix);
  CHECK(ss == std::vector<double>({0.0, 1.0}));
  CHECK(dist_order(mix) == 2);
}

TEST_CASE("pair_with_test") {
  auto t = kBump3;
  auto tj = eval_jet(t, 0.0, 1);
  // <delta', t> = -t'(0)
  Scalar p = pair_with_test(DistA::dirac(0.0, 1), t, kSupp3);
  CHECK(close(p, -tj[1], 1e-12));
  // <H, t> = integral of t over (0, inf)
  Scalar ph = pair_with_test(DistA::heaviside(), t, kSupp3);
  Scalar direct = integrate([&](double x) { return evaluate(t, x); }, 0.0, 3.0);
  CHECK(close(ph, direct, 1e-10));

  // Hormander commutativity through the pairing for disjoint supports
  DistGen gen(11);
  for (int trial = 0; trial < 5; ++trial) {
    DistA f = add(DistA::piecewise({-1.0}, {gen.piece(), gen.piece()}),
                  DistA::dirac(-1.0, 1, gen.coef()));
    DistA g = add(DistA::piecewise({1.0}, {gen.piece(), gen.piece()}),
                  DistA::dirac(1.0, 0, gen.coef()));
    Scalar a = pair_with_test(star(f, g), t, kSupp3);
    Scalar b = pair_with_test(star(g, f), t, kSupp3);
    CHECK(close(a, b, 1e-9));
  }
}

TEST_CASE("equals") {
  CHECK(equals(add(DistA::heaviside(), DistA::heaviside_minus()),
               DistA::constant(1), 1e-12));
  CHECK_FALSE(equals(DistA::dirac(0.0), DistA::dirac(0.0, 1), 1e-6));
  CHECK_FALSE(equals(DistA::dirac(0.0), DistA::dirac(0.0, 1), 1e-1));
  CHECK(equals(star(DistA::dirac(0.0), DistA::heaviside()), DistA::dirac(0.0),
               1e-12));
}

TEST_CASE("associativity on random triples") {
  DistGen gen(424242);
  for (int trial = 0; trial < 200; ++trial) {
    DistA f = gen.gen(), g = gen.gen(), k = gen.gen();
    DistA lhs = star(star(f, g), k);
    DistA rhs = star(f, star(g, k));
    CHECK(equals(lhs, rhs, 1e-9));
  }
}

TEST_CASE("distributivity") {
  DistGen gen(77);
  for (int trial = 0; trial < 40; ++trial) {
    DistA f = gen.gen(), g = gen.gen(), k = gen.gen();
    DistA lhs = star(f, add(g, k));
    DistA rhs = add(star(f, g), star(f, k));
    CHECK(equals(lhs, rhs, 1e-9));
  }
}

TEST_CASE("Leibniz rule") {
  DistGen gen(2718);
  for (int trial = 0; trial < 40; ++trial) {
    DistA f = gen.gen(), g = gen.gen();
    DistA lhs = derivative(star(f, g), 1);
    DistA rhs = add(star(derivative(f, 1), g), star(f, derivative(g, 1)));
    CHECK(equals(lhs, rhs, 1e-9));
  }
}

TEST_CASE("Hormander compatibility for disjoint singular supports") {
  DistGen gen(1234);
  for (int trial = 0; trial < 20; ++trial) {
    DistA f = add(DistA::piecewise({-1.0}, {gen.piece(), gen.piece()}),
                  DistA::dirac(-1.0, 2, gen.coef()));
    DistA g = add(DistA::piecewise({1.0}, {gen.piece(), gen.piece()}),
                  DistA::dirac(1.0, 1, gen.coef()));
    DistA fg = star(f, g);
    DistA gf = star(g, f);
    CHECK(equals(fg, gf, 1e-9));

    // independent dual-product oracle: pieces multiply pointwise and each
    // delta expands against the other factor's LEFT lateral piece (the
    // other factor is smooth across the point, so the side must not matter)
    auto [a, b] = refine(f, g);
    PiecewisePart pw;
    pw.breakpoints = a.breakpoints();
    for (std::size_t i = 0; i < a.pieces().size(); ++i)
      pw.pieces.push_back(fn_mul(a.pieces()[i], b.pieces()[i]));
    DeltaPart dp;
    auto expand_left = [&](const DistA& src, const DistA& other) {
      for (const auto& [key, c] : src.deltas().terms()) {
        std::size_t bi =
            std::lower_bound(a.breakpoints().begin(), a.breakpoints().end(),
                             key.first) -
            a.breakpoints().begin();
        DeltaPart e =
            dual_smooth_delta(*other.pieces()[bi], key.first, key.second);
        e.scale(c);
        dp.add(e);
      }
    };
    expand_left(a, b);
    expand_left(b, a);
    DistA oracle = canonicalize(DistA(std::move(pw), std::move(dp)));
    CHECK(equals(fg, oracle, 1e-9));
  }
}

TEST_CASE("smooth restriction factors out") {
  DistGen gen(90);
  for (int trial = 0; trial < 20; ++trial) {
    DistA g = gen.gen();
    // F smooth on (0, inf): piece f there, singular part at -1
    FnPtr f = gen.piece();
    DistA F = add(DistA::piecewise({-1.0}, {gen.piece(), f}),
                  DistA::dirac(-1.0, 1, gen.coef()));
    Interval omega{0.5, 4.0};
    DistA lhs = restrict_to(star(F, g), omega);
    DistA rhs = restrict_to(star(g, F), omega);
    DistA fg = star(DistA::smooth(f), restrict_to(g, omega));
    CHECK(equals(lhs, fg, 1e-9, omega));
    CHECK(equals(rhs, fg, 1e-9, omega));
  }
}

TEST_CASE("non-commutativity witness") {
  DistA hd = star(DistA::heaviside(), DistA::dirac(0.0));
  DistA dh = star(DistA::dirac(0.0), DistA::heaviside());
  CHECK_FALSE(equals(hd, dh, 1e-12));
}

TEST_CASE("derivative raises order by at most one") {
  DistGen gen(555);
  for (int trial = 0; trial < 30; ++trial) {
    DistA f = gen.gen();
    CHECK(dist_order(derivative(f, 1)) <= dist_order(f) + 1);
  }
}

TEST_CASE("json round trip") {
  DistGen gen(8880);
  for (int trial = 0; trial < 10; ++trial) {
    DistA f = gen.gen();
    DistA rt = dist_from_json(dist_to_json(f));
    CHECK(equals(f, rt, 1e-12));
  }
  DistA s = dist_from_json(nlohmann::json("sin(x)"));
  CHECK(equals(s, DistA::smooth(parse_expr("sin(x)")), 1e-14));
}
