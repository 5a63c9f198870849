#pragma once

// Linear ODEs with distributional coefficients: validation, smooth
// sub-solves per regular interval, delta-order matching at singular points
// (interface matrices A/B and the singular part), classification, and
// global IVP/BVP assembly.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "distrode/dist.hpp"
#include "distrode/linalg.hpp"

namespace distrode {

enum class CoefSide { Left, Right };

// One divergence-form term D^outer(coeff * D^inner w) (side Left) or
// D^outer(D^inner w * coeff) (side Right); expanded via the Leibniz rule
// before solving.
struct DivergenceTerm {
  int outer = 0;
  int inner = 0;
  CoefSide side = CoefSide::Left;
  DistA coeff;
};

struct ProblemSpec {
  int n = 0;
  std::vector<DistA> a, b;  // left/right coefficients; padded to n+1
  SmoothExpr f = SmoothExpr::constant(0.0);
  Interval domain{-1.0, 1.0};
  std::vector<DivergenceTerm> divergence_terms;
};

// Folds divergence terms into standard-form coefficients:
// D^m(c * D^k w) contributes C(m,j) c^(m-j) to the coefficient of w^(k+j).
ProblemSpec expand_divergence(const ProblemSpec& spec);

struct ValidationReport {
  bool ok = false;
  ValidationError::Kind kind = ValidationError::Kind::BadSpec;
  std::string message;
  int n = 0;
  int max_coef_order = 0;  // M: max distributional order of the delta parts
  std::vector<double> singular_points;
};

ValidationReport validate(const ProblemSpec& spec);

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 1000000;
};

// Smooth linear ODE sum_i c_i psi^(i) = rhs on one closed interval.
struct LocalOde {
  int n = 0;
  std::vector<FnPtr> c;  // size n+1, c[n] nonvanishing on the interval
  FnPtr rhs;
};

// Dense numeric solution with derivatives: orders 0..n-1 come from the
// integrated companion state, higher orders from the ODE relation
// (Taylor recurrence in the coefficients), never from numerical
// differentiation.
class SolutionFn {
 public:
  SolutionFn() = default;

  Interval interval() const;
  int order() const;

  // deriv-th derivative at x (any order; x is Taylor-extended from the
  // nearest mesh node, slightly outside the interval included).
  Scalar value(double x, int deriv = 0) const;

  // Derivatives 0..upto at x as a vector.
  Vector jets(double x, int upto) const;

  // Adapter exposing the deriv-th derivative as a SmoothFn piece.
  FnPtr piece_fn(int deriv = 0) const;

  struct Data;
  explicit SolutionFn(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  bool valid() const { return d_ != nullptr; }

 private:
  std::shared_ptr<const Data> d_;
};

// Adaptive explicit Runge-Kutta (Dormand-Prince 5(4)) on the first-order
// companion system, integrating from x0 to both interval ends.
// `jets` holds psi(x0)..psi^(n-1)(x0). Throws SolverError on step-size
// collapse.
SolutionFn solve_smooth_ivp(const LocalOde& ode, Interval interval, double x0,
                            const Vector& jets, const OdeOptions& opt = {});

// n homogeneous solutions with unit-coordinate jets at the anchor plus one
// particular solution with zero jets there (Wronskian = identity at the
// anchor).
struct FundamentalSystem {
  std::vector<SolutionFn> hom;
  SolutionFn part;
  double anchor = 0;
};
FundamentalSystem fundamental_system(const LocalOde& ode, Interval interval,
                                     double anchor, const OdeOptions& opt = {});

enum class InterfaceClass { Separating, Interacting, PartiallyInteracting };

const char* to_cstring(InterfaceClass c);

// Interface condition at one singular point, in the form
//   B * jets_plus = A * jets_minus + c,
// rows indexed by delta order (row r comes from matching delta^(r)).
// The singular part at the point is Delta = sum d_k delta^(k) with
//   d = delta_const + delta_map * [jets_minus; jets_plus].
struct InterfaceSystem {
  double x0 = 0;
  int n = 0;
  int delta_count = 0;  // number of d_k unknowns (= max(M_local - n, 0))
  Matrix A, B;          // n x n
  Vector c;
  Matrix delta_map;     // delta_count x 2n
  Vector delta_const;   // delta_count
  InterfaceClass tag = InterfaceClass::Separating;
  int dim_ker_A = 0, dim_ker_B = 0, dim_W = 0;
  bool rank_marginal = false;
};

InterfaceSystem build_interface_system(const ProblemSpec& spec, double x0);

// Classification per Ran A and Ran B: W = {0} separating, W = C^n
// interacting, otherwise partially interacting.
InterfaceClass classify(const Matrix& A, const Matrix& B,
                        double rank_tol = 1e-10, int* dim_W = nullptr,
                        int* dim_ker_A = nullptr, int* dim_ker_B = nullptr,
                        bool* marginal = nullptr);
InterfaceClass classify(const InterfaceSystem& sys);

enum class Existence { Unique, AffineFamily, None };

const char* to_cstring(Existence e);

struct GeneralizedSolution {
  int n = 0;
  Interval domain;
  std::vector<double> points;       // interior singular points
  std::vector<SolutionFn> pieces;   // representative, one per interval
  DeltaPart delta;                  // the singular part Delta
  Existence existence = Existence::None;
  int family_dim = 0;
  // kernel[j][k]: homogeneous direction j on interval k (attached whenever
  // family_dim > 0).
  std::vector<std::vector<SolutionFn>> kernel;

  bool solved() const { return existence != Existence::None; }
};

// Initial-value solve anchored at a regular point x0 with jets C; lateral
// jets propagate across each singular point through its interface system,
// left and right of the anchor interval.
GeneralizedSolution solve_ivp_global(const ProblemSpec& spec, double x0,
                                     const Vector& C,
                                     const OdeOptions& opt = {});

struct BoundaryRow {
  bool at_hi = false;  // false: domain.lo, true: domain.hi
  int jet_order = 0;   // 0..n-1
  Scalar value = 0;
};

GeneralizedSolution solve_bvp_global(const ProblemSpec& spec,
                                     const std::vector<BoundaryRow>& boundary,
                                     const OdeOptions& opt = {});

// Reconstructs psi as an algebra element (numeric pieces + Delta).
DistA to_dist(const GeneralizedSolution& sol);

// Relative residual of the reconstructed solution under the full
// distributional operator: sup over a 65-point mesh per interval of the
// regular part, and max delta-coefficient defect, both normalized by the
// magnitudes of the contributing terms.
struct ResidualReport {
  double piecewise_sup = 0;
  double delta_norm = 0;
};
ResidualReport residual(const ProblemSpec& spec, const GeneralizedSolution& sol);

struct SampleRow {
  double x;
  int side;  // -1 left limit, +1 right limit, 0 regular point
  std::vector<Scalar> jets;  // derivatives 0..n-1
};
std::vector<SampleRow> sample_solution(const GeneralizedSolution& sol,
                                       const std::vector<double>& mesh);

}  // namespace distrode
