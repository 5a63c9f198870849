#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "distrode/ode.hpp"
#include "distrode/taylor.hpp"

namespace distrode {

namespace {

// (v+1)(v+2)...(v+i)
double rising(int v, int i) {
  double r = 1.0;
  for (int j = 1; j <= i; ++j) r *= double(v + j);
  return r;
}

void rhs_eval(const LocalOde& ode, double x, const Vector& y, Vector& dy) {
  const int n = ode.n;
  for (int i = 0; i + 1 < n; ++i) dy[i] = y[i + 1];
  Scalar acc = ode.rhs->eval(x);
  for (int i = 0; i < n; ++i) acc -= ode.c[i]->eval(x) * y[i];
  Scalar cn = ode.c[n]->eval(x);
  if (cn == Scalar(0)) throw SolverError("leading coefficient vanished during integration");
  dy[n - 1] = acc / cn;
}

// Dormand-Prince 5(4) coefficients.
const double A21 = 1.0 / 5;
const double A31 = 3.0 / 40, A32 = 9.0 / 40;
const double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
const double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
             A54 = -212.0 / 729;
const double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
             A64 = 49.0 / 176, A65 = -5103.0 / 18656;
const double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
             B5 = -2187.0 / 6784, B6 = 11.0 / 84;
const double E1 = B1 - 5179.0 / 57600, E3 = B3 - 7571.0 / 16695,
             E4 = B4 - 393.0 / 640, E5 = B5 + 92097.0 / 339200,
             E6 = B6 - 187.0 / 2100, E7 = -1.0 / 40;

// One-directional adaptive march from x0 to xend; appends (x, y) nodes
// after the initial point.
void march(const LocalOde& ode, double x0, Vector y, double xend,
           const OdeOptions& opt, std::vector<double>& xs,
           std::vector<Vector>& ys) {
  const int n = ode.n;
  if (x0 == xend) return;
  const double dir = (xend > x0) ? 1.0 : -1.0;
  const double span = std::abs(xend - x0);
  const double hmax = span / 8.0;
  const double hmin = std::max(span, 1.0) * 1e-14;

  double x = x0;
  double h = std::min(hmax, span / 64.0);
  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ynew(n);
  long steps = 0;

  while (dir * (xend - x) > 0) {
    if (++steps > opt.max_steps) throw SolverError("step budget exhausted");
    h = std::min(h, std::abs(xend - x));
    double hs = dir * h;

    rhs_eval(ode, x, y, k1);
    yt = y + hs * A21 * k1;
    rhs_eval(ode, x + hs / 5, yt, k2);
    yt = y + hs * (A31 * k1 + A32 * k2);
    rhs_eval(ode, x + hs * 3 / 10, yt, k3);
    yt = y + hs * (A41 * k1 + A42 * k2 + A43 * k3);
    rhs_eval(ode, x + hs * 4 / 5, yt, k4);
    yt = y + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
    rhs_eval(ode, x + hs * 8 / 9, yt, k5);
    yt = y + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
    rhs_eval(ode, x + hs, yt, k6);
    ynew = y + hs * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    rhs_eval(ode, x + hs, ynew, k7);

    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      Scalar e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                       E6 * k6[i] + E7 * k7[i]);
      double sc = opt.atol +
                  opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double q = std::abs(e) / sc;
      err += q * q;
    }
    err = std::sqrt(err / n);
    if (!std::isfinite(err)) throw SolverError("non-finite state during integration");

    if (err <= 1.0) {
      x += hs;
      y = ynew;
      xs.push_back(x);
      ys.push_back(y);
    }
    double fac = (err == 0.0) ? 5.0
                              : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(h * fac, hmax);
    if (h < hmin && dir * (xend - x) > 0)
      throw SolverError("step-size collapse");
  }
}

}  // namespace

struct SolutionFn::Data {
  LocalOde ode;
  Interval iv;
  std::vector<double> xs;  // ascending mesh nodes
  std::vector<Vector> ys;

  mutable std::mutex mu;
  mutable std::map<std::size_t, taylor::Series> cache;

  // Taylor series of psi around node i, extended through the ODE relation.
  taylor::Series node_taylor(std::size_t i, int len) const {
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = cache.find(i);
      if (it != cache.end() && int(it->second.size()) >= len) return it->second;
    }
    const int n = ode.n;
    const double x0 = xs[i];
    std::vector<taylor::Series> cs(n + 1);
    for (int j = 0; j <= n; ++j)
      cs[j] = taylor::from_derivatives(ode.c[j]->jet(x0, len - 1));
    taylor::Series fr = taylor::from_derivatives(ode.rhs->jet(x0, len - 1));

    taylor::Series t(len, Scalar(0));
    double fact = 1.0;
    for (int j = 0; j < n && j < len; ++j) {
      if (j > 0) fact *= double(j);
      t[j] = ys[i][j] / fact;
    }
    for (int r = 0; n + r < len; ++r) {
      Scalar acc = fr[r];
      for (int j = 0; j <= n; ++j) {
        for (int u = 0; u <= r; ++u) {
          if (j == n && u == 0) continue;
          int v = r - u;
          acc -= cs[j][u] * t[v + j] * rising(v, j);
        }
      }
      t[n + r] = acc / (cs[n][0] * rising(r, n));
    }
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[i];
    if (int(slot.size()) < len) slot = t;
    return t;
  }

  std::size_t nearest_node(double x) const {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return 0;
    if (it == xs.end()) return xs.size() - 1;
    std::size_t hi = it - xs.begin();
    return (x - xs[hi - 1] <= xs[hi] - x) ? hi - 1 : hi;
  }
};

Interval SolutionFn::interval() const { return d_->iv; }
int SolutionFn::order() const { return d_->ode.n; }

Scalar SolutionFn::value(double x, int deriv) const {
  std::size_t i = d_->nearest_node(x);
  int len = std::max(d_->ode.n + 20, deriv + 8);
  taylor::Series t = d_->node_taylor(i, len);
  double dx = x - d_->xs[i];
  // deriv-th derivative of the Taylor polynomial.
  Scalar acc(0);
  for (int k = int(t.size()) - 1; k >= deriv; --k) {
    double ff = 1.0;
    for (int j = 0; j < deriv; ++j) ff *= double(k - j);
    acc = acc * dx + t[k] * ff;
  }
  return acc;
}

Vector SolutionFn::jets(double x, int upto) const {
  Vector out(upto + 1);
  std::size_t i = d_->nearest_node(x);
  int len = std::max(d_->ode.n + 20, upto + 8);
  taylor::Series t = d_->node_taylor(i, len);
  double dx = x - d_->xs[i];
  for (int d = 0; d <= upto; ++d) {
    Scalar acc(0);
    for (int k = int(t.size()) - 1; k >= d; --k) {
      double ff = 1.0;
      for (int j = 0; j < d; ++j) ff *= double(k - j);
      acc = acc * dx + t[k] * ff;
    }
    out[d] = acc;
  }
  return out;
}

namespace {

class SolutionPieceFn final : public SmoothFn {
 public:
  SolutionPieceFn(SolutionFn s, int deriv) : s_(std::move(s)), deriv_(deriv) {}
  Scalar eval(double x) const override { return s_.value(x, deriv_); }
  std::vector<Scalar> jet(double x, int maxk) const override {
    Vector j = s_.jets(x, deriv_ + maxk);
    std::vector<Scalar> out(maxk + 1);
    for (int k = 0; k <= maxk; ++k) out[k] = j[deriv_ + k];
    return out;
  }
  FnPtr derivative() const override {
    return std::make_shared<SolutionPieceFn>(s_, deriv_ + 1);
  }

 private:
  SolutionFn s_;
  int deriv_;
};

}  // namespace

FnPtr SolutionFn::piece_fn(int deriv) const {
  return std::make_shared<SolutionPieceFn>(*this, deriv);
}

SolutionFn solve_smooth_ivp(const LocalOde& ode, Interval interval, double x0,
                            const Vector& jets, const OdeOptions& opt) {
  if (ode.n < 1) throw std::invalid_argument("ODE order must be >= 1");
  if (int(jets.size()) != ode.n)
    throw std::invalid_argument("initial jet vector must have length n");
  if (!(interval.contains_closed(x0)))
    throw std::invalid_argument("x0 outside the interval");

  std::vector<double> xs_r, xs_l;
  std::vector<Vector> ys_r, ys_l;
  march(ode, x0, jets, interval.hi, opt, xs_r, ys_r);
  march(ode, x0, jets, interval.lo, opt, xs_l, ys_l);

  auto data = std::make_shared<SolutionFn::Data>();
  data->ode = ode;
  data->iv = interval;
  data->xs.reserve(xs_l.size() + xs_r.size() + 1);
  data->ys.reserve(xs_l.size() + xs_r.size() + 1);
  for (std::size_t i = xs_l.size(); i-- > 0;) {
    data->xs.push_back(xs_l[i]);
    data->ys.push_back(ys_l[i]);
  }
  data->xs.push_back(x0);
  data->ys.push_back(jets);
  for (std::size_t i = 0; i < xs_r.size(); ++i) {
    data->xs.push_back(xs_r[i]);
    data->ys.push_back(ys_r[i]);
  }
  return SolutionFn(std::move(data));
}

FundamentalSystem fundamental_system(const LocalOde& ode, Interval interval,
                                     double anchor, const OdeOptions& opt) {
  FundamentalSystem fs;
  fs.anchor = anchor;
  LocalOde hom = ode;
  hom.rhs = zero_fn();
  for (int j = 0; j < ode.n; ++j) {
    Vector e = Vector::Zero(ode.n);
    e[j] = Scalar(1);
    fs.hom.push_back(solve_smooth_ivp(hom, interval, anchor, e, opt));
  }
  fs.part = solve_smooth_ivp(ode, interval, anchor, Vector::Zero(ode.n), opt);
  return fs;
}

}  // namespace distrode
