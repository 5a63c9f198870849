#include "distrode/json_io.hpp"

namespace distrode {

using nlohmann::json;

json scalar_to_json(Scalar v) {
  if (v.imag() == 0.0) return v.real();
  return json::array({v.real(), v.imag()});
}

Scalar scalar_from_json(const json& j) {
  if (j.is_number()) return Scalar(j.get<double>());
  if (j.is_array() && j.size() == 2)
    return Scalar(j[0].get<double>(), j[1].get<double>());
  if (j.is_object())
    return Scalar(j.value("re", 0.0), j.value("im", 0.0));
  throw SchemaError("expected a scalar (number, [re,im], or {re,im})");
}

json dist_to_json(const DistA& d) {
  DistA c = canonicalize(d);
  json out;
  out["breakpoints"] = c.breakpoints();
  json pieces = json::array();
  for (const auto& p : c.pieces()) {
    const SmoothExpr* e = p->expr();
    if (!e) throw SchemaError("piece is not symbolic; cannot serialize");
    pieces.push_back(e->str());
  }
  out["pieces"] = pieces;
  json deltas = json::array();
  for (const auto& [key, coef] : c.deltas().terms())
    deltas.push_back({{"x", key.first},
                      {"order", key.second},
                      {"re", coef.real()},
                      {"im", coef.imag()}});
  out["deltas"] = deltas;
  return out;
}

DistA dist_from_json(const json& j) {
  if (j.is_string()) return DistA::smooth(parse_expr(j.get<std::string>()));
  if (j.is_number()) return DistA::constant(Scalar(j.get<double>()));
  if (!j.is_object()) throw SchemaError("expected a distribution object");

  std::vector<double> breaks;
  if (j.contains("breakpoints")) breaks = j["breakpoints"].get<std::vector<double>>();
  std::vector<FnPtr> pieces;
  if (j.contains("pieces"))
    for (const auto& p : j["pieces"])
      pieces.push_back(make_fn(parse_expr(p.get<std::string>())));
  if (pieces.empty()) pieces.push_back(zero_fn());
  if (pieces.size() != breaks.size() + 1)
    throw SchemaError("pieces must number breakpoints + 1");

  DeltaPart dp;
  if (j.contains("deltas")) {
    for (const auto& d : j["deltas"]) {
      if (!d.contains("x") || !d.contains("order"))
        throw SchemaError("delta term needs x and order");
      Scalar coef(d.value("re", 0.0), d.value("im", 0.0));
      dp.add_term(d["x"].get<double>(), d["order"].get<int>(), coef);
    }
  }
  return canonicalize(DistA(PiecewisePart{breaks, pieces}, dp));
}

ProblemFile problem_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("problem file must be a JSON object");
  ProblemFile out;
  if (!j.contains("n")) throw SchemaError("problem needs \"n\"");
  out.spec.n = j["n"].get<int>();
  if (j.contains("a"))
    for (const auto& c : j["a"]) out.spec.a.push_back(dist_from_json(c));
  if (j.contains("b"))
    for (const auto& c : j["b"]) out.spec.b.push_back(dist_from_json(c));
  if (j.contains("f")) out.spec.f = parse_expr(j["f"].get<std::string>());
  if (!j.contains("domain") || !j["domain"].is_array() || j["domain"].size() != 2)
    throw SchemaError("problem needs \"domain\": [lo, hi]");
  out.spec.domain = {j["domain"][0].get<double>(), j["domain"][1].get<double>()};

  if (j.contains("divergence_terms")) {
    for (const auto& t : j["divergence_terms"]) {
      DivergenceTerm dt;
      dt.outer = t.value("outer", 0);
      dt.inner = t.value("inner", 0);
      std::string side = t.value("side", "left");
      if (side != "left" && side != "right")
        throw SchemaError("divergence side must be left or right");
      dt.side = side == "left" ? CoefSide::Left : CoefSide::Right;
      if (!t.contains("coeff")) throw SchemaError("divergence term needs coeff");
      dt.coeff = dist_from_json(t["coeff"]);
      out.spec.divergence_terms.push_back(std::move(dt));
    }
  }

  if (!j.contains("condition")) throw SchemaError("problem needs \"condition\"");
  const json& c = j["condition"];
  std::string type = c.value("type", "");
  if (type == "ivp") {
    out.is_bvp = false;
    if (!c.contains("x0") || !c.contains("C"))
      throw SchemaError("ivp condition needs x0 and C");
    out.x0 = c["x0"].get<double>();
    const json& C = c["C"];
    out.C = Vector(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) out.C[i] = scalar_from_json(C[i]);
  } else if (type == "bvp") {
    out.is_bvp = true;
    if (!c.contains("rows")) throw SchemaError("bvp condition needs rows");
    for (const auto& r : c["rows"]) {
      BoundaryRow row;
      std::string ep = r.value("endpoint", "");
      if (ep != "lo" && ep != "hi")
        throw SchemaError("boundary endpoint must be lo or hi");
      row.at_hi = ep == "hi";
      row.jet_order = r.value("jet_order", 0);
      row.value = r.contains("value") ? scalar_from_json(r["value"]) : Scalar(0);
      out.rows.push_back(row);
    }
  } else {
    throw SchemaError("condition type must be ivp or bvp");
  }
  return out;
}

BeamSpec beam_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("beam file must be a JSON object");
  BeamSpec s;
  for (const char* key : {"A", "B", "L", "C"})
    if (!j.contains(key))
      throw SchemaError(std::string("beam needs \"") + key + "\"");
  s.A = j["A"].get<double>();
  s.B = j["B"].get<double>();
  s.L = j["L"].get<double>();
  s.C = j["C"].get<double>();
  s.K0 = j.value("K0", 0.0);
  s.K1 = j.value("K1", 0.0);
  if (j.contains("P0")) s.P0 = dist_from_json(j["P0"]);
  if (j.contains("P1")) s.P1 = dist_from_json(j["P1"]);
  return s;
}

}  // namespace distrode
