#pragma once

// Runtime smooth-function abstraction used for the pieces of algebra
// elements. Pieces can be symbolic expression trees, numeric ODE solutions,
// quadrature-backed antiderivatives, or pointwise combinations of those;
// all of them expose evaluation and exact jets (derivative stacks).

#include <memory>
#include <vector>

#include "distrode/common.hpp"
#include "distrode/expr.hpp"

namespace distrode {

class SmoothFn;
using FnPtr = std::shared_ptr<const SmoothFn>;

class SmoothFn {
 public:
  virtual ~SmoothFn() = default;

  virtual Scalar eval(double x) const = 0;

  // Derivatives 0..maxk at x.
  virtual std::vector<Scalar> jet(double x, int maxk) const = 0;

  virtual FnPtr derivative() const = 0;

  // Non-null when the function is a symbolic expression (serializable).
  virtual const SmoothExpr* expr() const { return nullptr; }

  virtual bool constant_value(Scalar* out) const {
    (void)out;
    return false;
  }
};

FnPtr make_fn(const SmoothExpr& e);
FnPtr const_fn(Scalar c);
FnPtr zero_fn();
FnPtr one_fn();

FnPtr fn_add(FnPtr a, FnPtr b);
FnPtr fn_sub(FnPtr a, FnPtr b);
FnPtr fn_mul(FnPtr a, FnPtr b);
FnPtr fn_scale(Scalar c, FnPtr a);

// F(x) = value_at_anchor + integral of f from anchor to x, evaluated by
// cached adaptive quadrature. Exact derivative stack comes from f.
FnPtr fn_antiderivative(FnPtr f, double anchor, Scalar value_at_anchor);

bool is_zero_fn(const FnPtr& f);

}  // namespace distrode
