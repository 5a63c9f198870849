#pragma once

// Canonical representation of the distribution algebra: every element is a
// piecewise smooth function over finitely many breakpoints plus a finite
// linear combination of Dirac deltas and their derivatives, together with
// the intrinsic (star) product, distributional calculus, restriction,
// order, and test-function pairing.

#include <map>
#include <utility>
#include <vector>

#include "distrode/common.hpp"
#include "distrode/smooth_fn.hpp"

namespace distrode {

// Finite map (point, derivative order) -> coefficient, representing
// sum c_ij * delta^(j)(x - x_i). Canonical form stores no zero coefficient.
class DeltaPart {
 public:
  using Key = std::pair<double, int>;
  using Map = std::map<Key, Scalar>;

  void add_term(double x, int order, Scalar c) {
    if (order < 0) throw std::invalid_argument("delta order must be >= 0");
    terms_[{x, order}] += c;
  }
  void add(const DeltaPart& other) {
    for (const auto& [k, c] : other.terms_) terms_[k] += c;
  }
  void scale(Scalar s) {
    for (auto& [k, c] : terms_) c *= s;
  }
  // Drops exactly-zero coefficients.
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (it->second == Scalar(0)) ? terms_.erase(it) : std::next(it);
  }
  bool empty() const { return terms_.empty(); }
  int max_order() const {
    int m = -1;
    for (const auto& [k, c] : terms_) m = std::max(m, k.second);
    return m;
  }
  std::vector<double> points() const {
    std::vector<double> p;
    for (const auto& [k, c] : terms_)
      if (p.empty() || p.back() != k.first) p.push_back(k.first);
    return p;
  }
  Scalar coef(double x, int order) const {
    auto it = terms_.find({x, order});
    return it == terms_.end() ? Scalar(0) : it->second;
  }
  const Map& terms() const { return terms_; }
  Map& terms() { return terms_; }

 private:
  Map terms_;
};

// Breakpoints x_1 < ... < x_m with m+1 smooth pieces; piece i lives on
// (x_{i-1}, x_i), with x_0 = -inf and x_{m+1} = +inf.
struct PiecewisePart {
  std::vector<double> breakpoints;
  std::vector<FnPtr> pieces;  // size breakpoints.size() + 1

  // Index of the piece whose open interval contains x (breakpoints resolve
  // to the piece on their right).
  std::size_t piece_index(double x) const;
  Interval piece_interval(std::size_t i) const;
};

class DistA {
 public:
  DistA() { pw_.pieces.push_back(zero_fn()); }
  DistA(PiecewisePart pw, DeltaPart dp) : pw_(std::move(pw)), dp_(std::move(dp)) {
    if (pw_.pieces.size() != pw_.breakpoints.size() + 1)
      throw std::invalid_argument("piece/breakpoint count mismatch");
  }

  static DistA smooth(FnPtr f);
  static DistA smooth(const SmoothExpr& e) { return smooth(make_fn(e)); }
  static DistA piecewise(std::vector<double> breaks, std::vector<FnPtr> pieces);
  static DistA dirac(double x0, int order = 0, Scalar coef = Scalar(1));
  static DistA heaviside();        // H
  static DistA heaviside_minus();  // H_- = 1 - H
  static DistA constant(Scalar c) { return smooth(const_fn(c)); }

  const std::vector<double>& breakpoints() const { return pw_.breakpoints; }
  const std::vector<FnPtr>& pieces() const { return pw_.pieces; }
  const PiecewisePart& piecewise_part() const { return pw_; }
  const DeltaPart& deltas() const { return dp_; }
  DeltaPart& deltas() { return dp_; }

  bool is_smooth() const { return pw_.breakpoints.empty() && dp_.empty(); }

  // Value of the regular part at x (undefined exactly on breakpoints; the
  // right piece is used there).
  Scalar eval_regular(double x) const {
    return pw_.pieces[pw_.piece_index(x)]->eval(x);
  }

 private:
  PiecewisePart pw_;
  DeltaPart dp_;
};

// Drops zero delta coefficients, inserts delta points as breakpoints (with
// equal lateral pieces), sorts and deduplicates breakpoints.
DistA canonicalize(const DistA& f);

// Rewrites both over the union of breakpoints; values unchanged.
std::pair<DistA, DistA> refine(const DistA& f, const DistA& g);

DistA add(const DistA& f, const DistA& g);
DistA sub(const DistA& f, const DistA& g);
DistA scale(Scalar c, const DistA& f);

// Expansion of g(x) * delta^(k)(x - x0) into a pure delta combination:
//   sum_{j<=k} C(k,j) (-1)^j g^(j)(x0) delta^(k-j)(x - x0).
DeltaPart dual_smooth_delta(const SmoothFn& g, double x0, int k);

// The intrinsic product. At each singular point the left factor
// contributes its piece to the LEFT and the right factor its piece to the
// RIGHT, matching the limit definition F(x) G(x+eps), eps -> 0+.
DistA star(const DistA& f, const DistA& g);

// Distributional derivative: pieces differentiate, lateral jumps emit
// deltas, existing delta orders rise.
DistA derivative(const DistA& f, int k = 1);

// Right inverse of derivative(., 1): delta^(k) -> delta^(k-1) for k >= 1,
// delta -> unit jump; piece antiderivatives are quadrature-backed, with
// constants chosen left to right (leftmost constant 0).
DistA antiderivative(const DistA& f);

DistA restrict_to(const DistA& f, Interval interval);

struct SingSuppOptions {
  int max_jet = 8;
  double tol = 1e-9;
};

// Delta points plus breakpoints where some lateral jet differs; false
// breakpoints (equal pieces) are filtered numerically.
std::vector<double> sing_supp(const DistA& f, const SingSuppOptions& opt = {});

// 0 for delta-free elements, else 1 + max delta order.
int dist_order(const DistA& f);

// <F, t> with t treated as a test function supported in `support`
// (finite): quadrature of pieces against t plus sum of
// c_ij (-1)^j t^(j)(x_i) over deltas inside the support.
Scalar pair_with_test(const DistA& f, const SmoothExpr& t, Interval support);

// Delta parts match within tol (absolute) and pieces match within
// tol * (1 + |v|) at 33 sample points per common-refinement interval,
// clipped to `domain` (default: hull of breakpoints and [-5, 5]).
bool equals(const DistA& f, const DistA& g, double tol);
bool equals(const DistA& f, const DistA& g, double tol, Interval domain);

}  // namespace distrode
