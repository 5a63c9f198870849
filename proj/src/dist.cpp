#include "distrode/dist.hpp"

#include <algorithm>
#include <cmath>

#include "distrode/quadrature.hpp"

namespace distrode {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

}  // namespace

std::size_t PiecewisePart::piece_index(double x) const {
  return std::upper_bound(breakpoints.begin(), breakpoints.end(), x) -
         breakpoints.begin();
}

Interval PiecewisePart::piece_interval(std::size_t i) const {
  Interval iv;
  iv.lo = (i == 0) ? -kInf : breakpoints[i - 1];
  iv.hi = (i == breakpoints.size()) ? kInf : breakpoints[i];
  return iv;
}

DistA DistA::smooth(FnPtr f) {
  PiecewisePart pw;
  pw.pieces.push_back(std::move(f));
  return DistA(std::move(pw), DeltaPart{});
}

DistA DistA::piecewise(std::vector<double> breaks, std::vector<FnPtr> pieces) {
  PiecewisePart pw;
  pw.breakpoints = std::move(breaks);
  pw.pieces = std::move(pieces);
  return canonicalize(DistA(std::move(pw), DeltaPart{}));
}

DistA DistA::dirac(double x0, int order, Scalar coef) {
  DeltaPart dp;
  dp.add_term(x0, order, coef);
  DistA d(PiecewisePart{{}, {zero_fn()}}, std::move(dp));
  return canonicalize(d);
}

DistA DistA::heaviside() {
  return DistA::piecewise({0.0}, {zero_fn(), one_fn()});
}

DistA DistA::heaviside_minus() {
  return DistA::piecewise({0.0}, {one_fn(), zero_fn()});
}

DistA canonicalize(const DistA& f) {
  DeltaPart dp = f.deltas();
  dp.prune();

  std::vector<double> breaks = f.breakpoints();
  for (double x : dp.points()) breaks.push_back(x);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  PiecewisePart pw;
  pw.breakpoints = breaks;
  pw.pieces.reserve(breaks.size() + 1);
  const PiecewisePart& old = f.piecewise_part();
  for (std::size_t i = 0; i <= breaks.size(); ++i) {
    double lo = (i == 0) ? -kInf : breaks[i - 1];
    double hi = (i == breaks.size()) ? kInf : breaks[i];
    double probe = std::isinf(lo) ? (std::isinf(hi) ? 0.0 : hi - 1.0)
                   : std::isinf(hi) ? lo + 1.0
                                    : 0.5 * (lo + hi);
    pw.pieces.push_back(old.pieces[old.piece_index(probe)]);
  }
  return DistA(std::move(pw), std::move(dp));
}

std::pair<DistA, DistA> refine(const DistA& f, const DistA& g) {
  DistA cf = canonicalize(f), cg = canonicalize(g);
  std::vector<double> breaks = cf.breakpoints();
  breaks.insert(breaks.end(), cg.breakpoints().begin(), cg.breakpoints().end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto remap = [&breaks](const DistA& d) {
    PiecewisePart pw;
    pw.breakpoints = breaks;
    const PiecewisePart& old = d.piecewise_part();
    for (std::size_t i = 0; i <= breaks.size(); ++i) {
      double lo = (i == 0) ? -kInf : breaks[i - 1];
      double hi = (i == breaks.size()) ? kInf : breaks[i];
      double probe = std::isinf(lo) ? (std::isinf(hi) ? 0.0 : hi - 1.0)
                     : std::isinf(hi) ? lo + 1.0
                                      : 0.5 * (lo + hi);
      pw.pieces.push_back(old.pieces[old.piece_index(probe)]);
    }
    return DistA(std::move(pw), d.deltas());
  };
  return {remap(cf), remap(cg)};
}

DistA add(const DistA& f, const DistA& g) {
  auto [a, b] = refine(f, g);
  PiecewisePart pw;
  pw.breakpoints = a.breakpoints();
  for (std::size_t i = 0; i < a.pieces().size(); ++i)
    pw.pieces.push_back(fn_add(a.pieces()[i], b.pieces()[i]));
  DeltaPart dp = a.deltas();
  dp.add(b.deltas());
  return canonicalize(DistA(std::move(pw), std::move(dp)));
}

DistA sub(const DistA& f, const DistA& g) { return add(f, scale(Scalar(-1), g)); }

DistA scale(Scalar c, const DistA& f) {
  PiecewisePart pw;
  pw.breakpoints = f.breakpoints();
  for (const auto& p : f.pieces()) pw.pieces.push_back(fn_scale(c, p));
  DeltaPart dp = f.deltas();
  dp.scale(c);
  return canonicalize(DistA(std::move(pw), std::move(dp)));
}

DeltaPart dual_smooth_delta(const SmoothFn& g, double x0, int k) {
  DeltaPart out;
  auto jets = g.jet(x0, k);
  double sign = 1.0;
  for (int j = 0; j <= k; ++j) {
    out.add_term(x0, k - j, sign * binom(k, j) * jets[j]);
    sign = -sign;
  }
  out.prune();
  return out;
}

DistA star(const DistA& f, const DistA& g) {
  auto [a, b] = refine(f, g);
  const auto& breaks = a.breakpoints();

  PiecewisePart pw;
  pw.breakpoints = breaks;
  for (std::size_t i = 0; i < a.pieces().size(); ++i)
    pw.pieces.push_back(fn_mul(a.pieces()[i], b.pieces()[i]));

  DeltaPart dp;
  auto break_index = [&breaks](double x) {
    return std::size_t(std::lower_bound(breaks.begin(), breaks.end(), x) -
                       breaks.begin());
  };
  // Left factor's deltas pick up the right factor's RIGHT lateral piece.
  for (const auto& [key, c] : a.deltas().terms()) {
    std::size_t bi = break_index(key.first);
    DeltaPart e = dual_smooth_delta(*b.pieces()[bi + 1], key.first, key.second);
    e.scale(c);
    dp.add(e);
  }
  // Right factor's deltas pick up the left factor's LEFT lateral piece.
  for (const auto& [key, c] : b.deltas().terms()) {
    std::size_t bi = break_index(key.first);
    DeltaPart e = dual_smooth_delta(*a.pieces()[bi], key.first, key.second);
    e.scale(c);
    dp.add(e);
  }
  // Delta times delta vanishes; nothing to collect.
  return canonicalize(DistA(std::move(pw), std::move(dp)));
}

DistA derivative(const DistA& f, int k) {
  if (k < 0) throw std::invalid_argument("derivative: k must be >= 0");
  DistA cur = canonicalize(f);
  for (int step = 0; step < k; ++step) {
    PiecewisePart pw;
    pw.breakpoints = cur.breakpoints();
    for (const auto& p : cur.pieces()) pw.pieces.push_back(p->derivative());

    DeltaPart dp;
    for (const auto& [key, c] : cur.deltas().terms())
      dp.add_term(key.first, key.second + 1, c);
    for (std::size_t i = 0; i < cur.breakpoints().size(); ++i) {
      double x = cur.breakpoints()[i];
      Scalar jump = cur.pieces()[i + 1]->eval(x) - cur.pieces()[i]->eval(x);
      if (jump != Scalar(0)) dp.add_term(x, 0, jump);
    }
    cur = canonicalize(DistA(std::move(pw), std::move(dp)));
  }
  return cur;
}

DistA antiderivative(const DistA& f) {
  DistA cf = canonicalize(f);
  const auto& breaks = cf.breakpoints();
  PiecewisePart pw;
  pw.breakpoints = breaks;

  if (breaks.empty()) {
    pw.pieces.push_back(fn_antiderivative(cf.pieces()[0], 0.0, Scalar(0)));
  } else {
    pw.pieces.resize(breaks.size() + 1);
    pw.pieces[0] = fn_antiderivative(cf.pieces()[0], breaks[0], Scalar(0));
    for (std::size_t i = 1; i <= breaks.size(); ++i) {
      // Continuity at breaks[i-1] except for the jump mandated by a
      // zeroth-order delta there.
      Scalar left_val = pw.pieces[i - 1]->eval(breaks[i - 1]);
      Scalar jump = cf.deltas().coef(breaks[i - 1], 0);
      pw.pieces[i] =
          fn_antiderivative(cf.pieces()[i], breaks[i - 1], left_val + jump);
    }
  }

  DeltaPart dp;
  for (const auto& [key, c] : cf.deltas().terms())
    if (key.second >= 1) dp.add_term(key.first, key.second - 1, c);
  return canonicalize(DistA(std::move(pw), std::move(dp)));
}

DistA restrict_to(const DistA& f, Interval interval) {
  DistA cf = canonicalize(f);
  const auto& breaks = cf.breakpoints();

  std::vector<double> kept;
  std::size_t first = breaks.size();
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (interval.contains(breaks[i])) {
      if (kept.empty()) first = i;
      kept.push_back(breaks[i]);
    }
  }

  PiecewisePart pw;
  pw.breakpoints = kept;
  if (kept.empty()) {
    double probe = std::isinf(interval.lo)
                       ? (std::isinf(interval.hi) ? 0.0 : interval.hi - 1.0)
                   : std::isinf(interval.hi)
                       ? interval.lo + 1.0
                       : 0.5 * (interval.lo + interval.hi);
    pw.pieces.push_back(cf.pieces()[cf.piecewise_part().piece_index(probe)]);
  } else {
    for (std::size_t i = first; i <= first + kept.size(); ++i)
      pw.pieces.push_back(cf.pieces()[i]);
  }

  DeltaPart dp;
  for (const auto& [key, c] : cf.deltas().terms())
    if (interval.contains(key.first)) dp.add_term(key.first, key.second, c);
  return canonicalize(DistA(std::move(pw), std::move(dp)));
}

std::vector<double> sing_supp(const DistA& f, const SingSuppOptions& opt) {
  DistA cf = canonicalize(f);
  std::vector<double> out = cf.deltas().points();
  for (std::size_t i = 0; i < cf.breakpoints().size(); ++i) {
    double x = cf.breakpoints()[i];
    auto jl = cf.pieces()[i]->jet(x, opt.max_jet);
    auto jr = cf.pieces()[i + 1]->jet(x, opt.max_jet);
    bool jumps = false;
    for (int j = 0; j <= opt.max_jet && !jumps; ++j) {
      double scale = 1.0 + std::max(std::abs(jl[j]), std::abs(jr[j]));
      if (std::abs(jl[j] - jr[j]) > opt.tol * scale) jumps = true;
    }
    if (jumps) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int dist_order(const DistA& f) {
  DeltaPart dp = f.deltas();
  dp.prune();
  return dp.empty() ? 0 : 1 + dp.max_order();
}

Scalar pair_with_test(const DistA& f, const SmoothExpr& t, Interval support) {
  if (std::isinf(support.lo) || std::isinf(support.hi))
    throw std::invalid_argument("pair_with_test requires a finite support");
  DistA cf = canonicalize(f);

  Scalar total(0);
  const auto& pw = cf.piecewise_part();
  for (std::size_t i = 0; i < pw.pieces.size(); ++i) {
    Interval iv = pw.piece_interval(i);
    double lo = std::max(iv.lo, support.lo);
    double hi = std::min(iv.hi, support.hi);
    if (lo >= hi) continue;
    const SmoothFn& piece = *pw.pieces[i];
    total += integrate(
        [&](double x) { return piece.eval(x) * evaluate(t, x); }, lo, hi);
  }
  for (const auto& [key, c] : cf.deltas().terms()) {
    if (!support.contains(key.first)) continue;
    auto jt = eval_jet(t, key.first, key.second);
    double sign = (key.second % 2 == 0) ? 1.0 : -1.0;
    total += c * sign * jt[key.second];
  }
  return total;
}

bool equals(const DistA& f, const DistA& g, double tol) {
  double lo = -5.0, hi = 5.0;
  for (double x : f.breakpoints()) {
    lo = std::min(lo, x - 1.0);
    hi = std::max(hi, x + 1.0);
  }
  for (double x : g.breakpoints()) {
    lo = std::min(lo, x - 1.0);
    hi = std::max(hi, x + 1.0);
  }
  return equals(f, g, tol, Interval{lo, hi});
}

bool equals(const DistA& f, const DistA& g, double tol, Interval domain) {
  auto [a, b] = refine(f, g);

  DeltaPart keys = a.deltas();
  keys.add(b.deltas());
  for (const auto& [key, unused] : keys.terms()) {
    Scalar da = a.deltas().coef(key.first, key.second);
    Scalar db = b.deltas().coef(key.first, key.second);
    if (std::abs(da - db) > tol) return false;
  }

  const auto& pw = a.piecewise_part();
  for (std::size_t i = 0; i < pw.pieces.size(); ++i) {
    Interval iv = pw.piece_interval(i);
    double lo = std::max(iv.lo, domain.lo);
    double hi = std::min(iv.hi, domain.hi);
    if (lo >= hi) continue;
    for (int s = 0; s < 33; ++s) {
      double x = lo + (hi - lo) * (s + 0.5) / 33.0;
      Scalar va = pw.pieces[i]->eval(x);
      Scalar vb = b.pieces()[i]->eval(x);
      double scale = 1.0 + std::max(std::abs(va), std::abs(vb));
      if (std::abs(va - vb) > tol * scale) return false;
    }
  }
  return true;
}

}  // namespace distrode
