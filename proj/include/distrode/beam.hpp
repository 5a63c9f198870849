#pragma once

// Euler-Bernoulli front end: a clamped-clamped beam of length 2L made of
// two segments with stiffness A (left) and B (right), an optional
// structural crack at the contact point x = 0 modelled by Dirac delta
// terms with intensities K0/K1, and a constant distributed load C.

#include <optional>
#include <ostream>

#include "distrode/ode.hpp"

namespace distrode {

struct BeamSpec {
  double A = 0;   // left flexural stiffness (kN cm^2)
  double B = 0;   // right flexural stiffness (kN cm^2)
  double L = 0;   // half-length (cm)
  double C = 0;   // distributed load (kN/cm)
  double K0 = 0;  // crack intensity, left side of the contact point
  double K1 = 0;  // crack intensity, right side
  std::optional<DistA> P0, P1;  // axial-force coefficients (no closed form)
};

struct BeamProblem {
  ProblemSpec spec;
  std::vector<BoundaryRow> boundary;  // clamped-clamped rows
};

// Divergence-form fourth-order problem with
//   a0 = A H_-  - 2 A L K0 delta   (left),
//   a1 = B H    - 2 B L K1 delta   (right),
// outer derivative power 2 and right-hand side C.
BeamProblem beam_to_problem(const BeamSpec& spec);

// Integration constants of the piecewise-quartic deflection
// w_pm = C/(24 A_pm) x^4 + alpha_pm/6 x^3 + beta_pm/2 x^2 + gamma_pm x + eps_pm.
struct BeamConstants {
  double S = 0;
  double alpha_minus = 0, beta_minus = 0, gamma_minus = 0, eps_minus = 0;
  double alpha_plus = 0, beta_plus = 0, gamma_plus = 0, eps_plus = 0;

  std::array<double, 8> as_array() const {
    return {alpha_minus, beta_minus, gamma_minus, eps_minus,
            alpha_plus,  beta_plus,  gamma_plus,  eps_plus};
  }
};

// Closed-form constants for the clamped-clamped, constant-load,
// no-axial-force case.
BeamConstants beam_closed_form(const BeamSpec& spec);

struct BeamSolution {
  BeamSpec spec;
  GeneralizedSolution w;
  BeamConstants constants;  // recovered from the solved deflection
  DistA psi;                // w'' as an algebra element (with Dirac part)
  double slope_jump = 0;    // w'(0+) - w'(0-)
  ResidualReport resid;
};

// Full pipeline through the generic BVP solver.
BeamSolution solve_beam(const BeamSpec& spec, const OdeOptions& opt = {});

// CSV x,w,w1 on a uniform npoints mesh over [-L, L].
void emit_curves(const BeamSolution& sol, int npoints, std::ostream& os);

}  // namespace distrode
