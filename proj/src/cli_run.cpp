#include "distrode/cli_run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "distrode/beam.hpp"
#include "distrode/json_io.hpp"
#include "distrode/regularize.hpp"

namespace distrode {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

json validation_to_json(const ValidationReport& rep,
                        const std::vector<InterfaceSystem>& ifaces) {
  json v;
  v["ok"] = rep.ok;
  v["message"] = rep.message;
  v["n"] = rep.n;
  v["M"] = rep.max_coef_order;
  v["singular_points"] = rep.singular_points;
  json pts = json::array();
  for (const auto& f : ifaces) {
    pts.push_back({{"x0", f.x0},
                   {"classification", to_cstring(f.tag)},
                   {"dim_W", f.dim_W},
                   {"dim_ker_A", f.dim_ker_A},
                   {"dim_ker_B", f.dim_ker_B},
                   {"delta_count", f.delta_count},
                   {"rank_marginal", f.rank_marginal}});
  }
  v["interfaces"] = pts;
  return v;
}

RunReport finish(json doc, int code, const RunOptions& opt,
                 const char* report_name = "report.json") {
  doc["exit_code"] = code;
  doc["timestamp"] = timestamp_utc();
  RunReport out{std::move(doc), code};
  write_file(fs::path(opt.out_dir) / report_name, out.doc.dump(2) + "\n");
  return out;
}

json delta_to_json(const DeltaPart& dp) {
  json rows = json::array();
  for (const auto& [key, coef] : dp.terms())
    rows.push_back({{"x", key.first},
                    {"order", key.second},
                    {"re", coef.real()},
                    {"im", coef.imag()}});
  return rows;
}

}  // namespace

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    // trim
    while (!tok.empty() && std::isspace((unsigned char)tok.front())) tok.erase(tok.begin());
    while (!tok.empty() && std::isspace((unsigned char)tok.back())) tok.pop_back();
    if (tok.empty()) continue;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      double base = std::stod(tok.substr(0, caret));
      double e = std::stod(tok.substr(caret + 1));
      out.push_back(std::pow(base, e));
    } else {
      out.push_back(std::stod(tok));
    }
  }
  return out;
}

std::vector<double> default_schedule() {
  std::vector<double> out;
  for (int k = 3; k <= 10; ++k) out.push_back(std::pow(2.0, -k));
  return out;
}

RunReport cmd_solve(const std::string& problem_file, const RunOptions& opt) {
  json doc;
  doc["command"] = "solve";
  ProblemFile pf;
  try {
    std::string bytes = read_file(problem_file);
    doc["input_digest"] = fnv1a64(bytes);
    pf = problem_from_json(json::parse(bytes));
  } catch (const json::exception& e) {
    doc["error"] = std::string("json: ") + e.what();
    return finish(std::move(doc), 2, opt);
  } catch (const std::exception& e) {
    doc["error"] = e.what();
    return finish(std::move(doc), 2, opt);
  }

  OdeOptions ode_opt;
  ode_opt.rtol = opt.rtol;
  ode_opt.atol = opt.atol;

  ProblemSpec spec = expand_divergence(pf.spec);
  ValidationReport rep = validate(spec);
  std::vector<InterfaceSystem> ifaces;
  if (rep.ok)
    for (double x0 : rep.singular_points)
      ifaces.push_back(build_interface_system(spec, x0));
  doc["validation"] = validation_to_json(rep, ifaces);
  if (!rep.ok) {
    doc["error"] = rep.message;
    return finish(std::move(doc), 2, opt);
  }

  GeneralizedSolution sol;
  try {
    sol = pf.is_bvp ? solve_bvp_global(spec, pf.rows, ode_opt)
                    : solve_ivp_global(spec, pf.x0, pf.C, ode_opt);
  } catch (const std::exception& e) {
    doc["error"] = e.what();
    return finish(std::move(doc), 2, opt);
  }
  doc["existence"] = to_cstring(sol.existence);
  doc["family_dim"] = sol.family_dim;
  if (sol.existence == Existence::None) return finish(std::move(doc), 3, opt);

  ResidualReport rr = residual(spec, sol);
  doc["residuals"] = {{"piecewise_sup", rr.piecewise_sup},
                      {"delta_norm", rr.delta_norm}};

  // solution.csv on a uniform mesh (lateral rows at singular points).
  std::vector<double> mesh;
  for (int i = 0; i < opt.mesh; ++i)
    mesh.push_back(spec.domain.lo +
                   (spec.domain.hi - spec.domain.lo) * double(i) /
                       double(std::max(1, opt.mesh - 1)));
  auto rows = sample_solution(sol, mesh);
  std::ostringstream csv;
  csv << "x,side";
  for (int j = 0; j < sol.n; ++j) csv << ",psi" << j << "_re,psi" << j << "_im";
  csv << "\n";
  for (const auto& r : rows) {
    csv << fmt(r.x) << "," << (r.side < 0 ? "-" : r.side > 0 ? "+" : "");
    for (const auto& v : r.jets) csv << "," << fmt(v.real()) << "," << fmt(v.imag());
    csv << "\n";
  }
  write_file(fs::path(opt.out_dir) / "solution.csv", csv.str());
  write_file(fs::path(opt.out_dir) / "delta.json",
             delta_to_json(sol.delta).dump(2) + "\n");
  doc["outputs"] = {"solution.csv", "delta.json"};

  bool ok = rr.piecewise_sup <= opt.resid_tol && rr.delta_norm <= opt.resid_tol;
  int code = sol.existence == Existence::AffineFamily ? 4 : (ok ? 0 : 2);
  if (!ok) doc["error"] = "residuals above tolerance";
  return finish(std::move(doc), code, opt);
}

RunReport cmd_beam(const std::string& beam_file, const RunOptions& opt) {
  json doc;
  doc["command"] = "beam";
  BeamSpec spec;
  try {
    std::string bytes = read_file(beam_file);
    doc["input_digest"] = fnv1a64(bytes);
    spec = beam_from_json(json::parse(bytes));
  } catch (const json::exception& e) {
    doc["error"] = std::string("json: ") + e.what();
    return finish(std::move(doc), 2, opt);
  } catch (const std::exception& e) {
    doc["error"] = e.what();
    return finish(std::move(doc), 2, opt);
  }

  OdeOptions ode_opt;
  ode_opt.rtol = opt.rtol;
  ode_opt.atol = opt.atol;

  BeamSolution sol;
  try {
    sol = solve_beam(spec, ode_opt);
  } catch (const ValidationError& e) {
    doc["error"] = e.what();
    return finish(std::move(doc), 2, opt);
  } catch (const std::exception& e) {
    doc["error"] = e.what();
    return finish(std::move(doc), 2, opt);
  }

  auto constants_json = [](const BeamConstants& k) {
    return json{{"S", k.S},
                {"alpha_minus", k.alpha_minus}, {"beta_minus", k.beta_minus},
                {"gamma_minus", k.gamma_minus}, {"eps_minus", k.eps_minus},
                {"alpha_plus", k.alpha_plus},   {"beta_plus", k.beta_plus},
                {"gamma_plus", k.gamma_plus},   {"eps_plus", k.eps_plus}};
  };
  doc["constants"] = constants_json(sol.constants);
  doc["slope_jump"] = sol.slope_jump;
  doc["residuals"] = {{"piecewise_sup", sol.resid.piecewise_sup},
                      {"delta_norm", sol.resid.delta_norm}};
  doc["psi_delta"] = delta_to_json(sol.psi.deltas());

  if (!spec.P0 && !spec.P1) {
    BeamConstants cf = beam_closed_form(spec);
    doc["closed_form"] = constants_json(cf);
    double maxrel = 0;
    auto a = sol.constants.as_array(), b = cf.as_array();
    double scale = 0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.size(); ++i)
      maxrel = std::max(maxrel, std::abs(a[i] - b[i]) /
                                    (std::abs(b[i]) + 1e-12 * (scale + 1.0)));
    doc["closed_form_max_rel_diff"] = maxrel;
  }

  std::ostringstream csv;
  emit_curves(sol, opt.npoints, csv);
  write_file(fs::path(opt.out_dir) / "curves.csv", csv.str());
  json constants_out = doc["constants"];
  write_file(fs::path(opt.out_dir) / "constants.json",
             constants_out.dump(2) + "\n");
  doc["outputs"] = {"curves.csv", "constants.json"};

  bool ok = sol.resid.piecewise_sup <= opt.resid_tol &&
            sol.resid.delta_norm <= opt.resid_tol;
  if (!ok) doc["error"] = "residuals above tolerance";
  return finish(std::move(doc), ok ? 0 : 2, opt);
}

RunReport cmd_check_regularization(const std::string& file,
                                   const RunOptions& opt) {
  json doc;
  doc["command"] = "check-reg";
  if (opt.schedule.empty()) {
    doc["error"] = "empty eps schedule";
    return finish(std::move(doc), 2, opt);
  }

  struct Case {
    std::string label;
    DistA F, psi;
    RegSide side;
    TestFunction t;
  };
  std::vector<Case> cases;

  try {
    std::string bytes = read_file(file);
    doc["input_digest"] = fnv1a64(bytes);
    json j = json::parse(bytes);

    auto default_test = [](const DistA& F) {
      auto pts = sing_supp(F);
      double lo = -2, hi = 2;
      for (double x : pts) {
        lo = std::min(lo, x - 2);
        hi = std::max(hi, x + 2);
      }
      double c = 0.5 * (lo + hi), w = 0.5 * (hi - lo);
      std::ostringstream e;
      e << "exp(-1/(1 - ((x - " << c << ")/" << w << ")^2))";
      return TestFunction{parse_expr(e.str()), {lo, hi}};
    };

    if (j.contains("pairs")) {
      int idx = 0;
      for (const auto& pj : j["pairs"]) {
        Case c;
        c.label = pj.value("label", "pair" + std::to_string(idx++));
        c.F = dist_from_json(pj.at("F"));
        c.psi = dist_from_json(pj.at("psi"));
        std::string side = pj.value("side", "plus");
        c.side = side == "minus" ? RegSide::Minus : RegSide::Plus;
        if (pj.contains("test") && pj.contains("support"))
          c.t = TestFunction{parse_expr(pj["test"].get<std::string>()),
                             {pj["support"][0].get<double>(),
                              pj["support"][1].get<double>()}};
        else
          c.t = default_test(c.F);
        cases.push_back(std::move(c));
      }
    } else if (j.contains("n")) {
      // Problem file: left coefficients regularize from the plus side,
      // right coefficients from the minus side, against psi in {delta, H}.
      ProblemFile pf = problem_from_json(j);
      ProblemSpec spec = expand_divergence(pf.spec);
      auto add_cases = [&](const std::vector<DistA>& cs, const char* name,
                           RegSide side) {
        for (std::size_t i = 0; i < cs.size(); ++i) {
          DistA c = canonicalize(cs[i]);
          if (c.breakpoints().empty() && c.deltas().empty()) continue;
          for (const char* psiname : {"delta", "H"}) {
            Case cc;
            cc.label = std::string(name) + std::to_string(i) + ":psi=" + psiname;
            cc.F = c;
            cc.psi = std::string(psiname) == "delta" ? DistA::dirac(0.0)
                                                     : DistA::heaviside();
            cc.side = side;
            cc.t = default_test(c);
            cases.push_back(std::move(cc));
          }
        }
      };
      add_cases(spec.a, "a", RegSide::Plus);
      add_cases(spec.b, "b", RegSide::Minus);
    } else {
      throw SchemaError("expected a problem file or {\"pairs\": [...]}");
    }
  } catch (const json::exception& e) {
    doc["error"] = std::string("json: ") + e.what();
    return finish(std::move(doc), 2, opt);
  } catch (const std::exception& e) {
    doc["error"] = e.what();
    return finish(std::move(doc), 2, opt);
  }

  std::ostringstream csv;
  csv << "case,eps,residual,slope\n";
  json summary = json::array();
  for (const auto& c : cases) {
    auto rows = convergence_report(c.F, c.psi, c.t, opt.schedule, c.side);
    for (const auto& r : rows)
      csv << c.label << "," << fmt(r.eps) << "," << fmt(r.residual) << ","
          << fmt(r.slope) << "\n";
    summary.push_back({{"case", c.label},
                       {"final_residual", rows.back().residual}});
  }
  write_file(fs::path(opt.out_dir) / "convergence.csv", csv.str());
  doc["cases"] = summary;
  doc["outputs"] = {"convergence.csv"};
  return finish(std::move(doc), 0, opt);
}

}  // namespace distrode
