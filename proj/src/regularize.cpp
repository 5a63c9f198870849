#include "distrode/regularize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "distrode/quadrature.hpp"
#include "distrode/taylor.hpp"

namespace distrode {

namespace {

// Taylor series of exp(-1/(1-t^2)) in t around t0, |t0| < 1.
taylor::Series bump_series(double t0, int len) {
  using namespace taylor;
  Series t = variable(t0, len);
  Series den = sub(constant(Scalar(1), len), mul(t, t));
  Series arg = neg(div(constant(Scalar(1), len), den));
  return exp(arg);
}

// Smooth step: 0 for u <= -1, 1 for u >= 1, C^infinity in between,
// flat to all orders at the edges.
double step_h(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_step(double u) {
  if (u <= -1) return 0.0;
  if (u >= 1) return 1.0;
  double hp = step_h(0.5 * (1 + u));
  double hm = step_h(0.5 * (1 - u));
  return hp / (hp + hm);
}

// Taylor series of the smooth step in u around u0.
taylor::Series step_series(double u0, int len) {
  using namespace taylor;
  if (u0 <= -1) return constant(Scalar(0), len);
  if (u0 >= 1) return constant(Scalar(1), len);
  Series u = variable(u0, len);
  Series tp = scale(Scalar(0.5), add(constant(Scalar(1), len), u));
  Series tm = scale(Scalar(0.5), sub(constant(Scalar(1), len), u));
  Series hp = exp(neg(div(constant(Scalar(1), len), tp)));
  Series hm = exp(neg(div(constant(Scalar(1), len), tm)));
  return div(hp, add(hp, hm));
}

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DISTRODE_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = std::min<unsigned>(hw, unsigned(v));
  }
  return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  unsigned workers = std::min<std::size_t>(thread_cap(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        fn(i);
      }
    });
  for (auto& t : pool) t.join();
}

}  // namespace

double BumpKernel::profile_mass() {
  static const double z = [] {
    QuadOptions opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-14;
    return integrate(
               [](double t) {
                 return Scalar(t > -1 && t < 1 ? std::exp(-1.0 / (1 - t * t))
                                               : 0.0);
               },
               -1.0, 1.0, opt)
        .real();
  }();
  return z;
}

BumpKernel::BumpKernel(double x0, double eps) : x0_(x0), eps_(eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  norm_ = 1.0 / (profile_mass() * eps_);
}

double BumpKernel::eval(double x) const {
  double t = (x - x0_) / eps_;
  if (t <= -1 || t >= 1) return 0.0;
  return norm_ * std::exp(-1.0 / (1 - t * t));
}

std::vector<double> BumpKernel::jet(double x, int maxk) const {
  double t0 = (x - x0_) / eps_;
  std::vector<double> out(maxk + 1, 0.0);
  if (t0 <= -1 || t0 >= 1) return out;
  taylor::Series s = bump_series(t0, maxk + 1);
  // d/dx = (1/eps) d/dt
  double fact = 1.0, escale = 1.0;
  for (int k = 0; k <= maxk; ++k) {
    if (k > 0) {
      fact *= double(k);
      escale /= eps_;
    }
    out[k] = norm_ * (s[k] * fact * escale).real();
  }
  return out;
}

BumpKernel bump_mollifier(double x0, double eps) { return BumpKernel(x0, eps); }

RegularizedFn::RegularizedFn(DistA base, double eps, RegSide side)
    : base_(canonicalize(base)), eps_(eps), side_(side) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  shift_ = (side == RegSide::Plus) ? eps : -eps;
  centers_ = base_.breakpoints();
  for (std::size_t i = 1; i < centers_.size(); ++i)
    if (centers_[i] - centers_[i - 1] <= 2 * eps)
      throw ValidationError(
          ValidationError::Kind::BadSpec,
          "eps must be smaller than half the minimal breakpoint gap");
  for (double x : base_.deltas().points()) kernels_.emplace_back(x, eps);
}

Scalar RegularizedFn::eval_unshifted(double y) const {
  const auto& pw = base_.piecewise_part();
  const auto& b = pw.breakpoints;
  Scalar v(0);

  // Collar blend of the piecewise part.
  auto it = std::lower_bound(b.begin(), b.end(), y - eps_);
  if (it != b.end() && std::abs(y - *it) < eps_) {
    std::size_t i = it - b.begin();
    double u = (y - *it) / eps_;
    double s = smooth_step(u);
    v = (1.0 - s) * pw.pieces[i]->eval(y) + s * pw.pieces[i + 1]->eval(y);
  } else {
    v = pw.pieces[pw.piece_index(y)]->eval(y);
  }

  // Kernel-derivative sums for the delta part.
  for (const auto& [key, c] : base_.deltas().terms()) {
    if (std::abs(y - key.first) >= eps_) continue;
    for (const auto& k : kernels_) {
      if (k.x0() != key.first) continue;
      v += c * k.jet(y, key.second)[key.second];
      break;
    }
  }
  return v;
}

std::vector<Scalar> RegularizedFn::jet_unshifted(double y, int maxk) const {
  const auto& pw = base_.piecewise_part();
  const auto& b = pw.breakpoints;
  std::vector<Scalar> out(maxk + 1, Scalar(0));

  auto it = std::lower_bound(b.begin(), b.end(), y - eps_);
  if (it != b.end() && std::abs(y - *it) < eps_) {
    std::size_t i = it - b.begin();
    // s((y - x_i)/eps) as a Taylor series in y, times the lateral pieces.
    int len = maxk + 1;
    taylor::Series su = step_series((y - *it) / eps_, len);
    // rescale from u to y: coefficient k picks (1/eps)^k
    double esc = 1.0;
    for (int k = 0; k < len; ++k) {
      su[k] *= esc;
      esc /= eps_;
    }
    taylor::Series left = taylor::from_derivatives(pw.pieces[i]->jet(y, maxk));
    taylor::Series right =
        taylor::from_derivatives(pw.pieces[i + 1]->jet(y, maxk));
    taylor::Series one = taylor::constant(Scalar(1), len);
    taylor::Series blend =
        taylor::add(taylor::mul(taylor::sub(one, su), left),
                    taylor::mul(su, right));
    auto d = taylor::to_derivatives(blend);
    for (int k = 0; k <= maxk; ++k) out[k] = d[k];
  } else {
    auto d = pw.pieces[pw.piece_index(y)]->jet(y, maxk);
    for (int k = 0; k <= maxk; ++k) out[k] = d[k];
  }

  for (const auto& [key, c] : base_.deltas().terms()) {
    if (std::abs(y - key.first) >= eps_) continue;
    for (const auto& k : kernels_) {
      if (k.x0() != key.first) continue;
      auto kj = k.jet(y, maxk + key.second);
      for (int kk = 0; kk <= maxk; ++kk) out[kk] += c * kj[kk + key.second];
      break;
    }
  }
  return out;
}

Scalar RegularizedFn::eval(double x) const { return eval_unshifted(x - shift_); }

std::vector<Scalar> RegularizedFn::jet(double x, int maxk) const {
  return jet_unshifted(x - shift_, maxk);
}

std::vector<double> RegularizedFn::kinks() const {
  std::vector<double> out;
  for (double c : centers_) {
    out.push_back(c - eps_ + shift_);
    out.push_back(c + eps_ + shift_);
  }
  std::sort(out.begin(), out.end());
  return out;
}

RegularizedFn regularize(const DistA& F, double eps, RegSide side) {
  return RegularizedFn(F, eps, side);
}

double weak_residual(const DistA& F, const DistA& psi, const TestFunction& t,
                     double eps, RegSide side) {
  RegularizedFn reg(F, eps, side);
  DistA cpsi = canonicalize(psi);

  // <reg . psi, t>: dual product of the smooth regularization against psi.
  Scalar lhs(0);
  std::vector<double> splits = reg.kinks();
  const auto& pw = cpsi.piecewise_part();
  for (std::size_t i = 0; i < pw.pieces.size(); ++i) {
    Interval iv = pw.piece_interval(i);
    double lo = std::max(iv.lo, t.support.lo);
    double hi = std::min(iv.hi, t.support.hi);
    if (lo >= hi) continue;
    const SmoothFn& piece = *pw.pieces[i];
    lhs += integrate_split(
        [&](double x) { return reg.eval(x) * piece.eval(x) * evaluate(t.expr, x); },
        lo, hi, splits);
  }
  for (const auto& [key, c] : cpsi.deltas().terms()) {
    if (!t.support.contains(key.first)) continue;
    // c (-1)^k d^k/dx^k [reg * t](x_d) via Leibniz
    int k = key.second;
    auto jr = reg.jet(key.first, k);
    auto jt = eval_jet(t.expr, key.first, k);
    Scalar dk(0);
    double bin = 1.0;
    for (int j = 0; j <= k; ++j) {
      if (j > 0) bin = bin * double(k - j + 1) / double(j);
      dk += bin * jr[j] * jt[k - j];
    }
    lhs += c * (k % 2 == 0 ? 1.0 : -1.0) * dk;
  }

  DistA prod = (side == RegSide::Plus) ? star(F, psi) : star(psi, F);
  Scalar rhs = pair_with_test(prod, t.expr, t.support);
  return std::abs(lhs - rhs);
}

std::vector<ConvergenceRow> convergence_report(
    const DistA& F, const DistA& psi, const TestFunction& t,
    const std::vector<double>& schedule, RegSide side) {
  std::vector<ConvergenceRow> rows(schedule.size());
  parallel_for(schedule.size(), [&](std::size_t i) {
    rows[i].eps = schedule[i];
    rows[i].residual = weak_residual(F, psi, t, schedule[i], side);
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 || rows[i].residual <= 0 || rows[i - 1].residual <= 0 ||
        rows[i].eps == rows[i - 1].eps) {
      rows[i].slope = 0.0;
    } else {
      rows[i].slope = std::log(rows[i].residual / rows[i - 1].residual) /
                      std::log(rows[i].eps / rows[i - 1].eps);
    }
  }
  return rows;
}

}  // namespace distrode
