#include "distrode/smooth_fn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "distrode/quadrature.hpp"

namespace distrode {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

class ExprFn final : public SmoothFn {
 public:
  explicit ExprFn(SmoothExpr e) : e_(std::move(e)) {}

  Scalar eval(double x) const override { return evaluate(e_, x); }
  std::vector<Scalar> jet(double x, int maxk) const override {
    return eval_jet(e_, x, maxk);
  }
  FnPtr derivative() const override {
    return std::make_shared<ExprFn>(e_.derivative());
  }
  const SmoothExpr* expr() const override { return &e_; }
  bool constant_value(Scalar* out) const override { return e_.is_constant(out); }

 private:
  SmoothExpr e_;
};

class SumFn final : public SmoothFn {
 public:
  SumFn(FnPtr a, FnPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Scalar eval(double x) const override { return a_->eval(x) + b_->eval(x); }
  std::vector<Scalar> jet(double x, int maxk) const override {
    auto ja = a_->jet(x, maxk), jb = b_->jet(x, maxk);
    for (int k = 0; k <= maxk; ++k) ja[k] += jb[k];
    return ja;
  }
  FnPtr derivative() const override {
    return fn_add(a_->derivative(), b_->derivative());
  }

 private:
  FnPtr a_, b_;
};

class ProdFn final : public SmoothFn {
 public:
  ProdFn(FnPtr a, FnPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Scalar eval(double x) const override { return a_->eval(x) * b_->eval(x); }
  std::vector<Scalar> jet(double x, int maxk) const override {
    auto ja = a_->jet(x, maxk), jb = b_->jet(x, maxk);
    std::vector<Scalar> r(maxk + 1, Scalar(0));
    for (int k = 0; k <= maxk; ++k)
      for (int j = 0; j <= k; ++j) r[k] += binom(k, j) * ja[j] * jb[k - j];
    return r;
  }
  FnPtr derivative() const override {
    return fn_add(fn_mul(a_->derivative(), b_), fn_mul(a_, b_->derivative()));
  }

 private:
  FnPtr a_, b_;
};

class ScaleFn final : public SmoothFn {
 public:
  ScaleFn(Scalar c, FnPtr a) : c_(c), a_(std::move(a)) {}
  Scalar eval(double x) const override { return c_ * a_->eval(x); }
  std::vector<Scalar> jet(double x, int maxk) const override {
    auto j = a_->jet(x, maxk);
    for (auto& v : j) v *= c_;
    return j;
  }
  FnPtr derivative() const override { return fn_scale(c_, a_->derivative()); }
  bool constant_value(Scalar* out) const override {
    Scalar v;
    if (!a_->constant_value(&v)) return false;
    if (out) *out = c_ * v;
    return true;
  }

 private:
  Scalar c_;
  FnPtr a_;
};

class AntiderivFn final : public SmoothFn,
                          public std::enable_shared_from_this<AntiderivFn> {
 public:
  AntiderivFn(FnPtr f, double anchor, Scalar v0)
      : f_(std::move(f)), anchor_(anchor), v0_(v0) {
    cache_[anchor_] = v0_;
  }

  Scalar eval(double x) const override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.lower_bound(x);
    // Integrate from the nearest cached point.
    double x0 = anchor_;
    Scalar v0 = v0_;
    if (it != cache_.end() &&
        (it == cache_.begin() ||
         std::abs(it->first - x) < std::abs(std::prev(it)->first - x))) {
      x0 = it->first;
      v0 = it->second;
    } else if (it != cache_.begin()) {
      x0 = std::prev(it)->first;
      v0 = std::prev(it)->second;
    }
    if (x == x0) return v0;
    QuadOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-12;
    Scalar v = v0 + integrate([this](double t) { return f_->eval(t); }, x0, x, opt);
    if (cache_.size() < 4096) cache_[x] = v;
    return v;
  }

  std::vector<Scalar> jet(double x, int maxk) const override {
    std::vector<Scalar> r(maxk + 1);
    r[0] = eval(x);
    if (maxk >= 1) {
      auto jf = f_->jet(x, maxk - 1);
      for (int k = 1; k <= maxk; ++k) r[k] = jf[k - 1];
    }
    return r;
  }

  FnPtr derivative() const override { return f_; }

 private:
  FnPtr f_;
  double anchor_;
  Scalar v0_;
  mutable std::mutex mu_;
  mutable std::map<double, Scalar> cache_;
};

}  // namespace

FnPtr make_fn(const SmoothExpr& e) { return std::make_shared<ExprFn>(e); }

FnPtr const_fn(Scalar c) { return make_fn(SmoothExpr::constant(c)); }

FnPtr zero_fn() {
  static const FnPtr z = const_fn(Scalar(0));
  return z;
}

FnPtr one_fn() {
  static const FnPtr o = const_fn(Scalar(1));
  return o;
}

bool is_zero_fn(const FnPtr& f) {
  Scalar v;
  return f && f->constant_value(&v) && v == Scalar(0);
}

FnPtr fn_add(FnPtr a, FnPtr b) {
  Scalar ca, cb;
  if (a->constant_value(&ca) && b->constant_value(&cb)) return const_fn(ca + cb);
  if (is_zero_fn(a)) return b;
  if (is_zero_fn(b)) return a;
  if (a->expr() && b->expr())
    return make_fn(*a->expr() + *b->expr());
  return std::make_shared<SumFn>(std::move(a), std::move(b));
}

FnPtr fn_sub(FnPtr a, FnPtr b) { return fn_add(std::move(a), fn_scale(Scalar(-1), std::move(b))); }

FnPtr fn_mul(FnPtr a, FnPtr b) {
  Scalar ca, cb;
  bool const_a = a->constant_value(&ca), const_b = b->constant_value(&cb);
  if (const_a && const_b) return const_fn(ca * cb);
  if (const_a) return fn_scale(ca, std::move(b));
  if (const_b) return fn_scale(cb, std::move(a));
  if (a->expr() && b->expr())
    return make_fn(*a->expr() * *b->expr());
  return std::make_shared<ProdFn>(std::move(a), std::move(b));
}

FnPtr fn_scale(Scalar c, FnPtr a) {
  if (c == Scalar(0)) return zero_fn();
  if (c == Scalar(1)) return a;
  Scalar v;
  if (a->constant_value(&v)) return const_fn(c * v);
  if (a->expr()) return make_fn(scale(c, *a->expr()));
  return std::make_shared<ScaleFn>(c, std::move(a));
}

FnPtr fn_antiderivative(FnPtr f, double anchor, Scalar value_at_anchor) {
  return std::make_shared<AntiderivFn>(std::move(f), anchor, value_at_anchor);
}

}  // namespace distrode
