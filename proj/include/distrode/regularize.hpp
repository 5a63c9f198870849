#pragma once

// Smooth one-parameter regularization families of algebra elements:
// pieces are blended across eps-collars by a smooth cutoff, delta parts
// become derivative-of-kernel sums, and the whole is shifted by -eps
// (plus side) or +eps (minus side). The weak-operator-limit claims are
// checked empirically through weak_residual / convergence_report.

#include <vector>

#include "distrode/dist.hpp"

namespace distrode {

enum class RegSide { Plus, Minus };

// Smooth non-negative kernel with support [x0-eps, x0+eps] and unit mass,
// profile exp(-1/(1-t^2)).
class BumpKernel {
 public:
  BumpKernel(double x0, double eps);

  double x0() const { return x0_; }
  double eps() const { return eps_; }

  double eval(double x) const;
  // Derivatives 0..maxk at x.
  std::vector<double> jet(double x, int maxk) const;

  // Integral of exp(-1/(1-t^2)) over [-1,1], computed once by quadrature.
  static double profile_mass();

 private:
  double x0_, eps_, norm_;
};

BumpKernel bump_mollifier(double x0, double eps);

class RegularizedFn {
 public:
  RegularizedFn(DistA base, double eps, RegSide side);

  Scalar eval(double x) const;
  std::vector<Scalar> jet(double x, int maxk) const;

  double eps() const { return eps_; }
  RegSide side() const { return side_; }
  const DistA& base() const { return base_; }

  // Formula-switch points (collar edges) in the argument coordinate, for
  // quadrature subdivision.
  std::vector<double> kinks() const;

 private:
  Scalar eval_unshifted(double y) const;
  std::vector<Scalar> jet_unshifted(double y, int maxk) const;

  DistA base_;
  double eps_;
  RegSide side_;
  double shift_;  // argument is evaluated at x - shift_
  std::vector<double> centers_;
  std::vector<BumpKernel> kernels_;
};

// Throws ValidationError when eps is not smaller than half the minimal
// gap between singular points.
RegularizedFn regularize(const DistA& F, double eps, RegSide side);

struct TestFunction {
  SmoothExpr expr;
  Interval support;
};

// | <regularize(F,eps,side) . psi, t> - <side==Plus ? F*psi : psi*F, t> |
// where the first pairing multiplies the smooth regularization against psi
// by the dual product (delta terms of psi hit the regularization
// pointwise) and integrates by quadrature.
double weak_residual(const DistA& F, const DistA& psi, const TestFunction& t,
                     double eps, RegSide side);

struct ConvergenceRow {
  double eps;
  double residual;
  double slope;  // pairwise decay exponent vs the previous row; 0 on row 0
};

// Schedule entries may be evaluated in parallel (capped by the
// DISTRODE_THREADS environment variable).
std::vector<ConvergenceRow> convergence_report(
    const DistA& F, const DistA& psi, const TestFunction& t,
    const std::vector<double>& schedule, RegSide side = RegSide::Plus);

}  // namespace distrode
