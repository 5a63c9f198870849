#include "distrode/linalg.hpp"

namespace distrode {

namespace {

bool thresh_marginal(const Eigen::VectorXd& sv, double thresh) {
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh * 0.1 && sv[i] < thresh * 10.0 && sv[i] != sv[0])
      return true;
  return false;
}

}  // namespace

int mat_rank(const Matrix& m, double rel_thresh, bool* marginal) {
  if (m.size() == 0) {
    if (marginal) *marginal = false;
    return 0;
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  double thresh = rel_thresh * sv[0];
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  if (marginal) *marginal = sv[0] > 0 && thresh_marginal(sv, thresh);
  return rank;
}

Matrix kernel_basis(const Matrix& m, double rel_thresh) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double thresh = (sv.size() > 0 && sv[0] > 0) ? rel_thresh * sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

LinearSolveResult solve_affine(const Matrix& m, const Vector& rhs,
                               double rank_tol, double consistency_tol) {
  LinearSolveResult out;
  const int rows = int(m.rows()), cols = int(m.cols());

  // Row/column equilibration keeps mixed-magnitude systems (e.g. beam
  // boundary rows vs interface rows) well conditioned.
  Eigen::VectorXd dr(rows), dc(cols);
  for (int i = 0; i < rows; ++i) {
    double s = m.row(i).cwiseAbs().maxCoeff();
    dr[i] = (s > 0) ? 1.0 / s : 1.0;
  }
  Matrix ms = dr.asDiagonal() * m;
  for (int j = 0; j < cols; ++j) {
    double s = ms.col(j).cwiseAbs().maxCoeff();
    dc[j] = (s > 0) ? 1.0 / s : 1.0;
  }
  ms = ms * dc.asDiagonal();
  Vector rs = dr.asDiagonal() * rhs;

  Eigen::JacobiSVD<Matrix> svd(ms, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv[0] : 0.0;
  double thresh = rank_tol * smax;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  out.rank = rank;
  out.rank_marginal = smax > 0 && thresh_marginal(sv, thresh);

  auto apply_pinv = [&](const Vector& v) {
    Vector y = svd.matrixU().adjoint() * v;
    for (int i = 0; i < sv.size(); ++i) y[i] = (i < rank) ? y[i] / sv[i] : Scalar(0);
    return Vector(svd.matrixV() * y);
  };

  Vector ys = apply_pinv(rs);
  // Two rounds of iterative refinement in the scaled system.
  for (int round = 0; round < 2; ++round) {
    Vector r = rs - ms * ys;
    ys += apply_pinv(r);
  }

  double resid = (ms * ys - rs).norm();
  double scale = std::max({rs.norm(), smax * ys.norm(), 1e-300});
  out.residual_rel = resid / scale;
  out.consistent = out.residual_rel <= consistency_tol;

  out.solution = dc.asDiagonal() * ys;

  Matrix ks = svd.matrixV().rightCols(cols - rank);
  Matrix k = dc.asDiagonal() * ks;
  for (int j = 0; j < k.cols(); ++j) {
    double norm = k.col(j).norm();
    if (norm > 0) k.col(j) /= norm;
  }
  out.kernel = k;
  return out;
}

}  // namespace distrode
