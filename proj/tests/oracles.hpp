#pragma once

// Test-only oracles, independent of the library's solver path.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "distrode/common.hpp"

namespace testutil {

using distrode::Scalar;
using Vec = Eigen::VectorXcd;

// Classic fixed-step RK4 on y' = f(x, y).
inline Vec rk4_solve(const std::function<Vec(double, const Vec&)>& f, double a,
                     double b, Vec y, int steps) {
  double h = (b - a) / steps;
  double x = a;
  for (int i = 0; i < steps; ++i) {
    Vec k1 = f(x, y);
    Vec k2 = f(x + h / 2, y + (h / 2) * k1);
    Vec k3 = f(x + h / 2, y + (h / 2) * k2);
    Vec k4 = f(x + h, y + h * k3);
    y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    x += h;
  }
  return y;
}

// Companion-system right-hand side of sum c_i psi^(i) = rhs with plain
// callable coefficients.
inline std::function<Vec(double, const Vec&)> companion(
    int n, std::vector<std::function<Scalar(double)>> c,
    std::function<Scalar(double)> rhs) {
  return [n, c = std::move(c), rhs = std::move(rhs)](double x, const Vec& y) {
    Vec dy(n);
    for (int i = 0; i + 1 < n; ++i) dy[i] = y[i + 1];
    Scalar acc = rhs(x);
    for (int i = 0; i < n; ++i) acc -= c[i](x) * y[i];
    dy[n - 1] = acc / c[n](x);
    return dy;
  };
}

}  // namespace testutil
