#include <algorithm>
#include <map>

#include "ode_internal.hpp"

namespace distrode {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

// Affine scalar over the interface unknowns
// [d_0..d_{K-1}, psi_-(x0)..psi_-^(n-1)(x0), psi_+(x0)..psi_+^(n-1)(x0)].
struct Aff {
  Scalar c0{0};
  Vector w;

  explicit Aff(int dim) : w(Vector::Zero(dim)) {}
  Aff& operator+=(const Aff& o) {
    c0 += o.c0;
    w += o.w;
    return *this;
  }
  Aff& axpy(Scalar s, const Aff& o) {
    c0 += s * o.c0;
    w += s * o.w;
    return *this;
  }
};

}  // namespace

namespace detail {

InterfaceSystem build_interface_core(const Prepared& p, double x0) {
  const int n = p.spec.n;

  std::vector<LateralCoef> la(n + 1), lb(n + 1);
  int max_delta_order = -1;
  for (int i = 0; i <= n; ++i) {
    la[i] = lateral_coef(p.spec.a[i], x0);
    lb[i] = lateral_coef(p.spec.b[i], x0);
    for (const auto& [k, c] : la[i].deltas) max_delta_order = std::max(max_delta_order, k);
    for (const auto& [k, c] : lb[i].deltas) max_delta_order = std::max(max_delta_order, k);
  }
  const int M_local = max_delta_order + 1;  // local coefficient order
  const int K = std::max(M_local - n, 0);   // unknowns d_0..d_{K-1}
  const int rmax = std::max(n - 1, M_local - 1);
  const int jmax = n + rmax;  // highest lateral jet order that can appear
  const int dim = K + 2 * n;

  InterfaceSystem sys;
  sys.x0 = x0;
  sys.n = n;
  sys.delta_count = K;

  // Extended lateral jets: orders < n are the base unknowns, orders >= n
  // are eliminated through the r-times differentiated lateral ODE
  // (pivot a_n + b_n on that side, nonzero by validation).
  auto extend = [&](bool plus) {
    std::vector<Aff> jets;
    const int base = K + (plus ? n : 0);
    for (int j = 0; j < n; ++j) {
      Aff a(dim);
      a.w[base + j] = Scalar(1);
      jets.push_back(a);
    }
    std::vector<std::vector<Scalar>> cj(n + 1);
    for (int i = 0; i <= n; ++i) {
      FnPtr ci = fn_add(plus ? la[i].right : la[i].left,
                        plus ? lb[i].right : lb[i].left);
      auto v = ci->jet(x0, jmax - n);
      cj[i].assign(v.begin(), v.end());
    }
    auto fj = eval_jet(p.spec.f, x0, jmax - n);
    Scalar pivot = cj[n][0];
    for (int r = 0; n + r <= jmax; ++r) {
      Aff acc(dim);
      acc.c0 = fj[r];
      for (int i = 0; i <= n; ++i)
        for (int s = 0; s <= r; ++s) {
          if (i == n && s == r) continue;
          acc.axpy(-binom(r, s) * cj[i][r - s], jets[i + s]);
        }
      acc.c0 /= pivot;
      acc.w /= pivot;
      jets.push_back(acc);
    }
    return jets;
  };
  std::vector<Aff> mj = extend(false), pj = extend(true);

  // Collect the delta-matching rows: row[r] is the coefficient of
  // delta^(r)(x - x0) in the expanded equation.
  std::map<int, Aff> rows;
  auto row = [&](int r) -> Aff& {
    auto it = rows.find(r);
    if (it == rows.end()) it = rows.emplace(r, Aff(dim)).first;
    return it->second;
  };

  for (int i = 0; i <= n; ++i) {
    // Delta content of psi^(i): the differentiated singular part plus the
    // jump terms of the piecewise part.
    std::vector<std::pair<int, Aff>> dl;
    for (int k = 0; k < K; ++k) {
      Aff a(dim);
      a.w[k] = Scalar(1);
      dl.push_back({k + i, a});
    }
    for (int s = 0; s <= i - 1; ++s) {
      Aff jump(dim);
      jump += pj[s];
      jump.axpy(Scalar(-1), mj[s]);
      dl.push_back({i - 1 - s, jump});
    }

    // a_i * psi^(i) and psi^(i) * b_i: deltas of the right factor attach
    // the left factor's LEFT piece, deltas of the left factor attach the
    // right factor's RIGHT piece.
    for (const auto& [r, kappa] : dl) {
      auto gl = la[i].left->jet(x0, r);
      auto gr = lb[i].right->jet(x0, r);
      double sign = 1.0;
      for (int j = 0; j <= r; ++j) {
        row(r - j).axpy(sign * binom(r, j) * (gl[j] + gr[j]), kappa);
        sign = -sign;
      }
    }
    // Coefficient deltas against the regular part of psi^(i); delta times
    // delta vanishes and contributes nothing.
    for (const auto& [k, ac] : la[i].deltas) {
      double sign = 1.0;
      for (int j = 0; j <= k; ++j) {
        row(k - j).axpy(ac * sign * binom(k, j), pj[i + j]);
        sign = -sign;
      }
    }
    for (const auto& [k, bc] : lb[i].deltas) {
      double sign = 1.0;
      for (int j = 0; j <= k; ++j) {
        row(k - j).axpy(bc * sign * binom(k, j), mj[i + j]);
        sign = -sign;
      }
    }
  }

  // Solve the rows of order >= n top-down for the d_k; each row r holds
  // only d_k with k >= r - n, so the system is triangular with pivot
  // a_n-(x0) + b_n+(x0).
  std::vector<Aff> dsol(K, Aff(dim));
  for (int r = rmax; r >= n; --r) {
    auto it = rows.find(r);
    if (it == rows.end())
      throw SolverError("missing delta-order row in interface build");
    Aff rr = it->second;
    int q = r - n;
    Scalar pivot = rr.w[q];
    if (pivot == Scalar(0))
      throw ValidationError(ValidationError::Kind::DegenerateInterface,
                            "zero pivot in delta-order elimination");
    rr.w[q] = Scalar(0);
    Aff expr(dim);
    expr.axpy(Scalar(-1) / pivot, rr);
    dsol[q] = expr;
    for (auto& [ord, other] : rows) {
      if (ord >= r) continue;
      Scalar coef = other.w[q];
      if (coef == Scalar(0)) continue;
      other.w[q] = Scalar(0);
      other.axpy(coef, expr);
    }
  }

  // Remaining rows r = 0..n-1 give B psi_plus = A psi_minus + c.
  sys.A = Matrix::Zero(n, n);
  sys.B = Matrix::Zero(n, n);
  sys.c = Vector::Zero(n);
  for (int r = 0; r < n; ++r) {
    auto it = rows.find(r);
    if (it == rows.end()) continue;
    const Aff& rr = it->second;
    for (int j = 0; j < n; ++j) {
      sys.A(r, j) = -rr.w[K + j];
      sys.B(r, j) = rr.w[K + n + j];
    }
    sys.c[r] = -rr.c0;
  }

  sys.delta_map = Matrix::Zero(K, 2 * n);
  sys.delta_const = Vector::Zero(K);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < 2 * n; ++j) sys.delta_map(k, j) = dsol[k].w[K + j];
    sys.delta_const[k] = dsol[k].c0;
  }

  sys.tag = classify(sys.A, sys.B, 1e-10, &sys.dim_W, &sys.dim_ker_A,
                     &sys.dim_ker_B, &sys.rank_marginal);
  return sys;
}

}  // namespace detail

InterfaceSystem build_interface_system(const ProblemSpec& spec, double x0) {
  detail::Prepared p = detail::prepare(spec, false);
  bool found = false;
  for (double pt : p.points)
    if (pt == x0) found = true;
  if (!found)
    throw std::invalid_argument("x0 is not a singular point of the problem");
  return detail::build_interface_core(p, x0);
}

InterfaceClass classify(const Matrix& A, const Matrix& B, double rank_tol,
                        int* dim_W, int* dim_ker_A, int* dim_ker_B,
                        bool* marginal) {
  const int n = int(A.rows());
  bool m1 = false, m2 = false, m3 = false;
  int rkA = mat_rank(A, rank_tol, &m1);
  int rkB = mat_rank(B, rank_tol, &m2);
  Matrix AB(n, 2 * n);
  AB << A, B;
  int rkAB = mat_rank(AB, rank_tol, &m3);
  int W = rkA + rkB - rkAB;
  if (dim_W) *dim_W = W;
  if (dim_ker_A) *dim_ker_A = n - rkA;
  if (dim_ker_B) *dim_ker_B = n - rkB;
  if (marginal) *marginal = m1 || m2 || m3;
  if (W == 0) return InterfaceClass::Separating;
  if (W == n) return InterfaceClass::Interacting;
  return InterfaceClass::PartiallyInteracting;
}

InterfaceClass classify(const InterfaceSystem& sys) {
  return classify(sys.A, sys.B);
}

}  // namespace distrode
