#include "distrode/beam.hpp"

#include <cmath>
#include <cstdio>

namespace distrode {

namespace {

void check_spec(const BeamSpec& s) {
  if (!(s.A > 0 && s.B > 0 && s.L > 0))
    throw ValidationError(ValidationError::Kind::BadSpec,
                          "beam requires A > 0, B > 0, L > 0");
  if (s.K0 < 0 || s.K1 < 0)
    throw ValidationError(ValidationError::Kind::BadSpec,
                          "crack intensities must be non-negative");
}

}  // namespace

BeamProblem beam_to_problem(const BeamSpec& s) {
  check_spec(s);
  BeamProblem out;

  DistA a0 = add(scale(Scalar(s.A), DistA::heaviside_minus()),
                 DistA::dirac(0.0, 0, Scalar(-2.0 * s.A * s.L * s.K0)));
  DistA a1 = add(scale(Scalar(s.B), DistA::heaviside()),
                 DistA::dirac(0.0, 0, Scalar(-2.0 * s.B * s.L * s.K1)));

  out.spec.n = 4;
  out.spec.f = SmoothExpr::constant(s.C);
  out.spec.domain = {-s.L, s.L};
  out.spec.divergence_terms.push_back({2, 2, CoefSide::Left, a0});
  out.spec.divergence_terms.push_back({2, 2, CoefSide::Right, a1});
  if (s.P0) out.spec.divergence_terms.push_back({0, 2, CoefSide::Left, *s.P0});
  if (s.P1) out.spec.divergence_terms.push_back({0, 2, CoefSide::Right, *s.P1});

  out.boundary = {{false, 0, Scalar(0)},
                  {false, 1, Scalar(0)},
                  {true, 0, Scalar(0)},
                  {true, 1, Scalar(0)}};
  return out;
}

BeamConstants beam_closed_form(const BeamSpec& s) {
  check_spec(s);
  const double A = s.A, B = s.B, L = s.L, C = s.C;
  BeamConstants k;
  k.S = C * L * (A * A - 34 * A * B + B * B) /
        (A * A + 14 * A * B + B * B + 8 * (A * A * s.K0 + B * B * s.K1));
  const double S = k.S;
  k.alpha_minus = (B - A) * (3 * L * C + S) / (8 * A * (A + B));
  k.beta_minus = L * S / (12 * A);
  k.gamma_minus =
      (C * L * L * L * (17 * A - B) + L * L * S * (7 * A + B)) / (48 * A * (A + B));
  k.eps_minus = (3 * C * L * L * L * L + L * L * L * S) / (12 * (A + B));
  k.alpha_plus = (B - A) * (3 * L * C + S) / (8 * B * (A + B));
  k.beta_plus = L * S / (12 * B);
  k.gamma_plus =
      (C * L * L * L * (-A + 17 * B) + L * L * S * (A + 7 * B)) / (48 * B * (A + B));
  k.eps_plus = k.eps_minus;
  return k;
}

BeamSolution solve_beam(const BeamSpec& s, const OdeOptions& opt) {
  BeamProblem prob = beam_to_problem(s);
  BeamSolution out;
  out.spec = s;
  out.w = solve_bvp_global(prob.spec, prob.boundary, opt);
  if (out.w.existence != Existence::Unique)
    throw SolverError(std::string("beam BVP is not uniquely solvable (") +
                      to_cstring(out.w.existence) + ")");

  // Lateral jets at the contact point recover the quartic coefficients;
  // with no crack and A = B there is no singular point and both sides
  // coincide.
  std::size_t right_idx =
      std::upper_bound(out.w.points.begin(), out.w.points.end(), 0.0) -
      out.w.points.begin();
  std::size_t left_idx = right_idx > 0 ? right_idx - 1 : 0;
  Vector jm = out.w.pieces[left_idx].jets(0.0, 3);
  Vector jp = out.w.pieces[right_idx].jets(0.0, 3);

  out.constants.S = 12.0 * s.A * jm[2].real() / s.L;
  out.constants.eps_minus = jm[0].real();
  out.constants.gamma_minus = jm[1].real();
  out.constants.beta_minus = jm[2].real();
  out.constants.alpha_minus = jm[3].real();
  out.constants.eps_plus = jp[0].real();
  out.constants.gamma_plus = jp[1].real();
  out.constants.beta_plus = jp[2].real();
  out.constants.alpha_plus = jp[3].real();

  out.slope_jump = (jp[1] - jm[1]).real();
  out.psi = derivative(to_dist(out.w), 2);
  out.resid = residual(prob.spec, out.w);
  return out;
}

void emit_curves(const BeamSolution& sol, int npoints, std::ostream& os) {
  if (npoints < 2) npoints = 2;
  os << "x,w,w1\n";
  char buf[128];
  for (int i = 0; i < npoints; ++i) {
    double x = -sol.spec.L + 2 * sol.spec.L * double(i) / double(npoints - 1);
    std::size_t k =
        std::upper_bound(sol.w.points.begin(), sol.w.points.end(), x) -
        sol.w.points.begin();
    Vector j = sol.w.pieces[k].jets(x, 1);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", x, j[0].real(),
                  j[1].real());
    os << buf;
  }
}

}  // namespace distrode
