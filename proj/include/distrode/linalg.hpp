#pragma once

// Small dense complex linear algebra helpers: numerical rank, kernel
// bases, and consistent/min-norm affine solves with equilibration and
// iterative refinement.

#include <Eigen/Dense>

#include "distrode/common.hpp"

namespace distrode {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Rank by singular-value threshold rel_thresh * sigma_max. When `marginal`
// is non-null it is set when some singular value sits within a decade of
// the threshold (ties are reported, not silently resolved).
int mat_rank(const Matrix& m, double rel_thresh = 1e-10,
             bool* marginal = nullptr);

Matrix kernel_basis(const Matrix& m, double rel_thresh = 1e-10);

struct LinearSolveResult {
  bool consistent = false;
  Vector solution;   // minimum-norm solution of the equilibrated system
  Matrix kernel;     // kernel basis of M (columns, normalized)
  double residual_rel = 0.0;
  int rank = 0;
  bool rank_marginal = false;
};

LinearSolveResult solve_affine(const Matrix& m, const Vector& rhs,
                               double rank_tol = 1e-10,
                               double consistency_tol = 1e-8);

}  // namespace distrode
