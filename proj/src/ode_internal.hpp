#pragma once

// Shared internals of the distributional ODE solver.

#include <vector>

#include "distrode/ode.hpp"

namespace distrode::detail {

// Evaluator for the regular part of a piecewise function, bound to a home
// interval so that lateral evaluation at the interval's own endpoints
// resolves to the interior piece (not the one across the singular point).
FnPtr regular_part_fn(const PiecewisePart& pw, Interval home);

struct LateralCoef {
  FnPtr left, right;                          // lateral pieces at the point
  std::vector<std::pair<int, Scalar>> deltas;  // (order, coefficient) at the point
};

struct Prepared {
  ProblemSpec spec;  // expanded; coefficients canonical over the domain
  ValidationReport report;
  std::vector<double> points;          // interior singular points
  std::vector<Interval> intervals;     // points.size() + 1 closed pieces
  std::vector<LocalOde> odes;          // per interval
  std::vector<InterfaceSystem> ifaces; // per point

  std::size_t interval_of(double x) const;
};

// Expands, validates (throwing ValidationError on failure) and assembles
// the per-interval smooth ODEs and per-point interface systems.
Prepared prepare(const ProblemSpec& spec, bool build_interfaces = true);

LateralCoef lateral_coef(const DistA& coef, double x0);

InterfaceSystem build_interface_core(const Prepared& p, double x0);

}  // namespace distrode::detail
