#pragma once

// JSON schemas for algebra elements, problem files and beam files.
//
// DistA: { "breakpoints": [r...], "pieces": ["expr"...],
//          "deltas": [{"x": r, "order": k, "re": r, "im": r}...] }
// (a bare "expr" string is accepted as a smooth element).
//
// Problem: { "n": int, "a": [DistA...], "b": [DistA...], "f": "expr",
//            "domain": [lo, hi],
//            "divergence_terms": [{"outer": m, "inner": k,
//                                  "side": "left"|"right", "coeff": DistA}...],
//            "condition": {"type": "ivp", "x0": r, "C": [scalar...]}
//                       | {"type": "bvp", "rows": [{"endpoint": "lo"|"hi",
//                            "jet_order": k, "value": scalar}...]} }
//
// Beam: {"A": r, "B": r, "L": r, "C": r, "K0": r, "K1": r,
//        "P0": DistA?, "P1": DistA?}
//
// Scalars are numbers, [re, im] pairs, or {"re": r, "im": r}.

#include <json.hpp>

#include "distrode/beam.hpp"
#include "distrode/ode.hpp"

namespace distrode {

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json scalar_to_json(Scalar v);
Scalar scalar_from_json(const nlohmann::json& j);

nlohmann::json dist_to_json(const DistA& d);  // requires symbolic pieces
DistA dist_from_json(const nlohmann::json& j);

struct ProblemFile {
  ProblemSpec spec;
  bool is_bvp = false;
  double x0 = 0;
  Vector C;
  std::vector<BoundaryRow> rows;
};

ProblemFile problem_from_json(const nlohmann::json& j);
BeamSpec beam_from_json(const nlohmann::json& j);

}  // namespace distrode
