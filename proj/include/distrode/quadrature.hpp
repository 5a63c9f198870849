#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature for complex-valued integrands
// on finite intervals, with caller-supplied split points at known kinks.

#include <functional>
#include <vector>

#include "distrode/common.hpp"

namespace distrode {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 52;
};

Scalar integrate(const std::function<Scalar(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

// Integrates over [a, b], pre-subdividing at every split point inside.
Scalar integrate_split(const std::function<Scalar(double)>& f, double a,
                       double b, std::vector<double> splits,
                       const QuadOptions& opt = {});

}  // namespace distrode
