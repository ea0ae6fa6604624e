// weylkit command-line front end: scenario-driven compatibility checks,
// weylization and geodesic experiments with machine-readable reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "weylkit/commands.hpp"
#include "weylkit/errors.hpp"
#include "weylkit/tensor.hpp"
#include "weylkit/version.hpp"

namespace {

void print_report(const std::string& report) {
  std::fwrite(report.data(), 1, report.size(), stdout);
  std::fputc('\n', stdout);
}

void write_report_file(const std::string& path, const std::string& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw weylkit::Error("cannot write report file '" + path + "'");
  out << report << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weylkit: chart-local compatibility analysis of conformal and "
               "projective structures, Weyl-connection recovery, and geodesic "
               "verification"};
  app.set_version_flag("--version", std::string("weylkit ") + weylkit::kVersion);
  app.require_subcommand(1);

  weylkit::RunOptions opt;
  double degeneracy = 0.0;
  app.add_option("--tol", opt.tol,
                 "Compatibility tolerance, relative to max(1, |D|_inf)");
  app.add_option("--samples", opt.samples,
                 "Null vectors sampled per point (default 10*dim^2)");
  app.add_option("--seed", opt.seed, "Base RNG seed (point k uses seed XOR k)");
  app.add_option("--geodesic-tol", opt.geodesic_tol,
                 "Pre-geodesic residual threshold for the geodesic command");
  app.add_option("--degeneracy-threshold", degeneracy,
                 "Relative metric degeneracy threshold (default 1e-12)");

  std::string scenario_path;
  std::string out_path;
  std::string out_dir;

  CLI::App* cmd_check =
      app.add_subcommand("check", "Pointwise light-cone compatibility verdicts");
  cmd_check->fallthrough();
  cmd_check->add_option("scenario", scenario_path, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_check->add_option("-o,--output", out_path,
                        "Also write the report to this file");

  CLI::App* cmd_weylize = app.add_subcommand(
      "weylize", "Recover the scale one-form of the compatible Weyl structure");
  cmd_weylize->fallthrough();
  cmd_weylize->add_option("scenario", scenario_path, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_weylize->add_option("-o,--output", out_path,
                          "Write the report to this file instead of stdout");

  CLI::App* cmd_geodesic = app.add_subcommand(
      "geodesic", "Integrate geodesics and measure drift and pre-geodesic residuals");
  cmd_geodesic->fallthrough();
  cmd_geodesic->add_option("scenario", scenario_path, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_geodesic->add_option("-o,--output-dir", out_dir,
                           "Directory for CSV traces and summary.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (degeneracy > 0.0) weylkit::set_degeneracy_threshold(degeneracy);
    const weylkit::Scenario sc = weylkit::load_scenario(scenario_path);

    if (cmd_check->parsed()) {
      const auto outcome = weylkit::run_check(sc, opt);
      if (!out_path.empty()) write_report_file(out_path, outcome.report);
      print_report(outcome.report);
      return outcome.exit_code;
    }
    if (cmd_weylize->parsed()) {
      const auto outcome = weylkit::run_weylize(sc, opt);
      if (!out_path.empty())
        write_report_file(out_path, outcome.report);
      else
        print_report(outcome.report);
      return outcome.exit_code;
    }
    if (cmd_geodesic->parsed()) {
      const auto outcome = weylkit::run_geodesic(sc, out_dir, opt);
      print_report(outcome.report);
      return outcome.exit_code;
    }
  } catch (const weylkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
