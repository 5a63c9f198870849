#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "distrode/expr.hpp"

namespace testutil {

using distrode::Scalar;
using distrode::SmoothExpr;

inline bool close(Scalar a, Scalar b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// Random expressions kept pole-free and bounded on [-5, 5]: denominators are
// offset squares, exp arguments are damped.
class ExprGen {
 public:
  explicit ExprGen(unsigned seed) : rng_(seed) {}

  SmoothExpr gen(int depth = 3) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
    switch (pick(rng_)) {
      case 0: return SmoothExpr::constant(unit());
      case 1: return SmoothExpr::var();
      case 2: return gen(depth - 1) + gen(depth - 1);
      case 3: return gen(depth - 1) - gen(depth - 1);
      case 4: return gen(depth - 1) * gen(depth - 1);
      case 5: return SmoothExpr::sin(gen(depth - 1));
      case 6: return SmoothExpr::cos(gen(depth - 1));
      case 7:
        return SmoothExpr::exp(SmoothExpr::constant(0.2 * unit()) *
                               SmoothExpr::sin(gen(depth - 1)));
      default: {
        // safe rational: p / (2 + x^2)
        SmoothExpr den = SmoothExpr::constant(2.0) +
                         SmoothExpr::var() * SmoothExpr::var();
        return gen(depth - 1) / den;
      }
    }
  }

  double unit() {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    return d(rng_);
  }

  double sample_x() {
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    return d(rng_);
  }

  std::mt19937& rng() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace testutil
