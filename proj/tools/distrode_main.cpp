#include <CLI11.hpp>
#include <iostream>

#include "distrode/cli_run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"distrode: ODEs with distributional coefficients"};
  app.require_subcommand(1);

  distrode::RunOptions opt;
  std::string input;
  std::string schedule_text = "2^-3,2^-4,2^-5,2^-6,2^-7,2^-8,2^-9,2^-10";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("input", input, "input JSON file")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--rtol", opt.rtol, "integrator relative tolerance");
    cmd->add_option("--atol", opt.atol, "integrator absolute tolerance");
    cmd->add_option("--resid-tol", opt.resid_tol,
                    "residual gate for exit code 0");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve a problem file");
  add_common(solve);
  solve->add_option("--mesh", opt.mesh, "solution.csv mesh size");

  CLI::App* beam = app.add_subcommand("beam", "solve a beam file");
  add_common(beam);
  beam->add_option("--npoints", opt.npoints, "curves.csv mesh size");

  CLI::App* reg = app.add_subcommand("check-reg", "regularization convergence");
  add_common(reg);
  reg->add_option("--schedule", schedule_text,
                  "comma-separated eps values (2^-k accepted)");

  CLI11_PARSE(app, argc, argv);

  distrode::RunReport report;
  try {
    if (solve->parsed()) {
      report = distrode::cmd_solve(input, opt);
    } else if (beam->parsed()) {
      report = distrode::cmd_beam(input, opt);
    } else {
      opt.schedule = distrode::parse_schedule(schedule_text);
      report = distrode::cmd_check_regularization(input, opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << report.doc.dump(2) << std::endl;
  return report.exit_code;
}
