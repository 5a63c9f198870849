#pragma once

// Command implementations behind the CLI: parse input files, run the
// pipelines, write CSV/JSON outputs and a run report.
//
// Exit codes: 0 solved and residuals below tolerance; 2 validation or
// input error; 3 no solution; 4 affine family (representative emitted).

#include <json.hpp>
#include <string>
#include <vector>

#include "distrode/ode.hpp"

namespace distrode {

struct RunOptions {
  std::string out_dir = ".";
  int mesh = 1001;
  int npoints = 1001;
  double rtol = 1e-10;
  double atol = 1e-12;
  double resid_tol = 1e-6;
  std::vector<double> schedule;  // eps schedule for check-reg
};

struct RunReport {
  nlohmann::json doc;
  int exit_code = 0;
};

// Comma-separated floats; "2^-k" tokens accepted.
std::vector<double> parse_schedule(const std::string& text);
std::vector<double> default_schedule();  // 2^-3 .. 2^-10

RunReport cmd_solve(const std::string& problem_file, const RunOptions& opt);
RunReport cmd_beam(const std::string& beam_file, const RunOptions& opt);
RunReport cmd_check_regularization(const std::string& file,
                                   const RunOptions& opt);

}  // namespace distrode
