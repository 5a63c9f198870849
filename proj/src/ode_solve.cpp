#include <algorithm>
#include <cmath>

#include "ode_internal.hpp"

namespace distrode {

namespace {

using detail::Prepared;

// Affine set of jets at a point: { u + W * sigma } over the family
// parameters collected so far.
struct AffineJets {
  Vector u;
  Matrix W;
};

// Per-interval records of initial jets (at the interval's entry anchor) as
// affine functions of the family parameters.
struct Record {
  double anchor = 0;
  Vector u;
  Matrix W;
};

// Propagates jets across the regular interval `idx` from `from` to `to`
// using its fundamental system anchored at `from`.
AffineJets propagate(const Prepared& p, std::size_t idx, double from,
                     double to, const AffineJets& in, const OdeOptions& opt) {
  const int n = p.spec.n;
  FundamentalSystem fs = fundamental_system(p.odes[idx], p.intervals[idx], from, opt);
  Matrix phi(n, n);
  for (int j = 0; j < n; ++j) phi.col(j) = fs.hom[j].jets(to, n - 1);
  Vector part = fs.part.jets(to, n - 1);
  AffineJets out;
  out.u = part + phi * in.u;
  out.W = phi * in.W;
  return out;
}

struct PropagationResult {
  bool ok = false;
  std::vector<Record> recs;  // indexed by interval
  int params = 0;
};

// Marches from the anchor interval outward in one direction, solving the
// interface system at each singular point. Under-determined interfaces add
// family parameters; inconsistent ones abort. Re-parameterizations update
// every record already collected.
PropagationResult propagate_direction(const Prepared& p, std::size_t ia,
                                      const Vector& C, double x0, bool rightward,
                                      const OdeOptions& opt) {
  const int n = p.spec.n;
  PropagationResult res;
  res.recs.assign(p.intervals.size(), Record{});
  res.recs[ia] = {x0, C, Matrix::Zero(n, 0)};

  int q = 0;
  std::size_t idx = ia;
  while (true) {
    bool more = rightward ? (idx + 1 < p.intervals.size()) : (idx > 0);
    if (!more) break;
    double s = rightward ? p.intervals[idx].hi : p.intervals[idx].lo;
    const InterfaceSystem& f = p.ifaces[rightward ? idx : idx - 1];

    AffineJets frontier = propagate(
        p, idx, res.recs[idx].anchor, s,
        AffineJets{res.recs[idx].u, res.recs[idx].W}, opt);

    // Rightward: solve B psi_+ = A psi_- + c for (psi_+, sigma).
    // Leftward:  solve A psi_- = B psi_+ - c for (psi_-, sigma).
    const Matrix& lead = rightward ? f.B : f.A;
    const Matrix& trail = rightward ? f.A : f.B;
    Vector base = trail * frontier.u + (rightward ? f.c : Vector(-f.c));
    Matrix M(n, n + q);
    M.leftCols(n) = lead;
    if (q > 0) M.rightCols(q) = -(trail * frontier.W);

    LinearSolveResult ls = solve_affine(M, base);
    if (!ls.consistent) return res;  // no solution anywhere in the family

    Vector zret = ls.solution;
    Matrix N = ls.kernel;
    int qn = int(N.cols());

    // sigma_old = tail(zret) + tail(N) * sigma_new
    Vector tau = zret.tail(q);
    Matrix Ntau = N.bottomRows(q);
    for (auto& r : res.recs) {
      if (r.u.size() == 0) continue;
      if (q > 0) r.u = r.u + r.W * tau;
      r.W = (q > 0) ? Matrix(r.W * Ntau) : Matrix::Zero(n, qn);
    }

    std::size_t next = rightward ? idx + 1 : idx - 1;
    res.recs[next] = {s, zret.head(n), N.topRows(n)};
    q = qn;
    idx = next;
  }
  res.ok = true;
  res.params = q;
  return res;
}

GeneralizedSolution assemble(const Prepared& p,
                             const std::vector<Record>& recs, int params,
                             const OdeOptions& opt) {
  const int n = p.spec.n;
  GeneralizedSolution sol;
  sol.n = n;
  sol.domain = p.spec.domain;
  sol.points = p.points;
  sol.existence = params == 0 ? Existence::Unique : Existence::AffineFamily;
  sol.family_dim = params;

  for (std::size_t k = 0; k < p.intervals.size(); ++k)
    sol.pieces.push_back(solve_smooth_ivp(p.odes[k], p.intervals[k],
                                          recs[k].anchor, recs[k].u, opt));

  if (params > 0) {
    LocalOde hom;
    sol.kernel.resize(params);
    for (int j = 0; j < params; ++j) {
      for (std::size_t k = 0; k < p.intervals.size(); ++k) {
        LocalOde h = p.odes[k];
        h.rhs = zero_fn();
        sol.kernel[j].push_back(solve_smooth_ivp(
            h, p.intervals[k], recs[k].anchor, recs[k].W.col(j), opt));
      }
    }
  }

  // Singular part from the per-point delta functionals at the
  // representative lateral jets.
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    const InterfaceSystem& f = p.ifaces[k];
    if (f.delta_count == 0) continue;
    Vector mp(2 * n);
    mp.head(n) = sol.pieces[k].jets(p.points[k], n - 1);
    mp.tail(n) = sol.pieces[k + 1].jets(p.points[k], n - 1);
    Vector d = f.delta_const + f.delta_map * mp;
    for (int kk = 0; kk < f.delta_count; ++kk)
      if (d[kk] != Scalar(0)) sol.delta.add_term(p.points[k], kk, d[kk]);
  }
  return sol;
}

}  // namespace

GeneralizedSolution solve_ivp_global(const ProblemSpec& spec, double x0,
                                     const Vector& C, const OdeOptions& opt) {
  Prepared p = detail::prepare(spec);
  const int n = p.spec.n;
  if (int(C.size()) != n)
    throw std::invalid_argument("initial jets must have length n");
  if (!p.spec.domain.contains_closed(x0))
    throw std::invalid_argument("x0 outside the domain");
  for (double pt : p.points)
    if (pt == x0)
      throw std::invalid_argument("x0 must be a regular point");

  std::size_t ia = p.interval_of(x0);

  PropagationResult right = propagate_direction(p, ia, C, x0, true, opt);
  if (!right.ok) {
    GeneralizedSolution none;
    none.n = n;
    none.domain = p.spec.domain;
    none.points = p.points;
    none.existence = Existence::None;
    return none;
  }
  PropagationResult left = propagate_direction(p, ia, C, x0, false, opt);
  if (!left.ok) {
    GeneralizedSolution none;
    none.n = n;
    none.domain = p.spec.domain;
    none.points = p.points;
    none.existence = Existence::None;
    return none;
  }

  // Left and right parameter blocks are independent; stack them.
  int params = left.params + right.params;
  std::vector<Record> recs(p.intervals.size());
  for (std::size_t k = 0; k < p.intervals.size(); ++k) {
    const Record& src = (k < ia) ? left.recs[k]
                        : (k > ia) ? right.recs[k]
                                   : right.recs[k];  // anchor: same in both
    recs[k].anchor = src.anchor;
    recs[k].u = src.u;
    recs[k].W = Matrix::Zero(p.spec.n, params);
    if (k < ia && left.params > 0)
      recs[k].W.leftCols(left.params) = src.W;
    if (k > ia && right.params > 0)
      recs[k].W.rightCols(right.params) = src.W;
  }
  return assemble(p, recs, params, opt);
}

GeneralizedSolution solve_bvp_global(const ProblemSpec& spec,
                                     const std::vector<BoundaryRow>& boundary,
                                     const OdeOptions& opt) {
  Prepared p = detail::prepare(spec);
  const int n = p.spec.n;
  const std::size_t ni = p.intervals.size();
  for (const auto& r : boundary)
    if (r.jet_order < 0 || r.jet_order >= n)
      throw std::invalid_argument("boundary jet order must be in 0..n-1");

  // Unknowns: jets of each interval's solution at its midpoint anchor.
  std::vector<FundamentalSystem> fs;
  std::vector<double> anchors;
  for (std::size_t k = 0; k < ni; ++k) {
    double mid = 0.5 * (p.intervals[k].lo + p.intervals[k].hi);
    anchors.push_back(mid);
    fs.push_back(fundamental_system(p.odes[k], p.intervals[k], mid, opt));
  }
  auto jets_at = [&](std::size_t k, double x) {
    Matrix H(n, n);
    for (int j = 0; j < n; ++j) H.col(j) = fs[k].hom[j].jets(x, n - 1);
    Vector part = fs[k].part.jets(x, n - 1);
    return std::pair<Matrix, Vector>(H, part);
  };

  const int rows = int(p.points.size()) * n + int(boundary.size());
  Matrix M = Matrix::Zero(rows, int(ni) * n);
  Vector rhs = Vector::Zero(rows);

  int r0 = 0;
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    double s = p.points[k];
    const InterfaceSystem& f = p.ifaces[k];
    auto [Hm, pm] = jets_at(k, s);
    auto [Hp, pp] = jets_at(k + 1, s);
    // B (pp + Hp g_{k+1}) - A (pm + Hm g_k) = c
    M.block(r0, int(k) * n, n, n) = -f.A * Hm;
    M.block(r0, int(k + 1) * n, n, n) = f.B * Hp;
    rhs.segment(r0, n) = f.c + f.A * pm - f.B * pp;
    r0 += n;
  }
  for (const auto& brow : boundary) {
    std::size_t k = brow.at_hi ? ni - 1 : 0;
    double x = brow.at_hi ? p.spec.domain.hi : p.spec.domain.lo;
    auto [H, part] = jets_at(k, x);
    M.block(r0, int(k) * n, 1, n) = H.row(brow.jet_order);
    rhs[r0] = brow.value - part[brow.jet_order];
    ++r0;
  }

  LinearSolveResult ls = solve_affine(M, rhs);
  GeneralizedSolution sol;
  if (!ls.consistent) {
    sol.n = n;
    sol.domain = p.spec.domain;
    sol.points = p.points;
    sol.existence = Existence::None;
    return sol;
  }

  std::vector<Record> recs(ni);
  int params = int(ls.kernel.cols());
  for (std::size_t k = 0; k < ni; ++k) {
    recs[k].anchor = anchors[k];
    recs[k].u = ls.solution.segment(int(k) * n, n);
    recs[k].W = ls.kernel.middleRows(int(k) * n, n);
  }
  return assemble(p, recs, params, opt);
}

DistA to_dist(const GeneralizedSolution& sol) {
  if (!sol.solved()) throw SolverError("no solution to convert");
  PiecewisePart pw;
  pw.breakpoints = sol.points;
  for (const auto& s : sol.pieces) pw.pieces.push_back(s.piece_fn());
  return canonicalize(DistA(std::move(pw), sol.delta));
}

ResidualReport residual(const ProblemSpec& spec, const GeneralizedSolution& sol) {
  Prepared p = detail::prepare(spec, false);
  if (!sol.solved()) throw SolverError("no solution to check");
  const int n = p.spec.n;
  DistA psi = to_dist(sol);

  std::vector<DistA> terms;
  for (int i = 0; i <= n; ++i) {
    DistA psi_i = derivative(psi, i);
    terms.push_back(star(p.spec.a[i], psi_i));
    terms.push_back(star(psi_i, p.spec.b[i]));
  }

  ResidualReport rep;
  FnPtr f = make_fn(p.spec.f);

  // Regular part: relative sup over a 65-point mesh per regular interval.
  for (const auto& iv : p.intervals) {
    for (int s = 0; s < 65; ++s) {
      double x = iv.lo + (iv.hi - iv.lo) * (s + 0.5) / 65.0;
      Scalar acc = -f->eval(x);
      double scale = std::abs(acc);
      for (const auto& t : terms) {
        Scalar v = t.eval_regular(x);
        acc += v;
        scale += std::abs(v);
      }
      rep.piecewise_sup =
          std::max(rep.piecewise_sup, std::abs(acc) / (scale + 1e-300));
    }
  }

  // Delta part: every delta order present in any term must cancel.
  // Defects are normalized by the largest delta magnitude contributed by
  // any term (a per-row scale would divide integrator noise by itself).
  DeltaPart keys;
  double scale = 0;
  for (const auto& t : terms) {
    keys.add(t.deltas());
    for (const auto& [key, v] : t.deltas().terms())
      scale = std::max(scale, std::abs(v));
  }
  for (const auto& [key, unused] : keys.terms()) {
    Scalar acc(0);
    for (const auto& t : terms) acc += t.deltas().coef(key.first, key.second);
    rep.delta_norm =
        std::max(rep.delta_norm, std::abs(acc) / (scale + 1e-300));
  }
  return rep;
}

std::vector<SampleRow> sample_solution(const GeneralizedSolution& sol,
                                       const std::vector<double>& mesh) {
  if (!sol.solved()) throw SolverError("no solution to sample");
  std::vector<SampleRow> rows;
  auto jets_of = [&](std::size_t k, double x) {
    Vector j = sol.pieces[k].jets(x, sol.n - 1);
    return std::vector<Scalar>(j.data(), j.data() + j.size());
  };
  for (double x : mesh) {
    auto it = std::lower_bound(sol.points.begin(), sol.points.end(), x);
    if (it != sol.points.end() && *it == x) {
      std::size_t k = it - sol.points.begin();
      rows.push_back({x, -1, jets_of(k, x)});
      rows.push_back({x, +1, jets_of(k + 1, x)});
    } else {
      std::size_t k = it - sol.points.begin();
      rows.push_back({x, 0, jets_of(k, x)});
    }
  }
  return rows;
}

}  // namespace distrode
