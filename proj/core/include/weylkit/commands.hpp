#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "weylkit/scenario.hpp"

namespace weylkit {

// CLI-level overrides; unset fields fall back to the scenario values.
struct RunOptions {
  std::optional<double> tol;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> geodesic_tol;
};

// exit_code follows the stable contract: 0 compatible/success, 2
// incompatible, 1 usage/parse/numeric error (raised as exceptions; the CLI
// maps them). `report` is the full JSON text, no trailing newline.
struct CommandOutcome {
  int exit_code = 0;
  std::string report;
};

// Pointwise analysis of every scenario point: null-cone sampling plus
// decomposition, verdict is the conjunction.
CommandOutcome run_check(const Scenario& sc, const RunOptions& opt = {});

// Theorem pipeline: recover phi samples at every point, cross-checked by
// sampling, plus the integrability verdict when a symbolic phi is available.
CommandOutcome run_weylize(const Scenario& sc, const RunOptions& opt = {});

// Integrates each requested geodesic with the Levi-Civita connection of the
// scenario metric, writes one CSV per curve into out_dir plus summary.json,
// and reports null-norm drift and the pre-geodesic residual against the
// scenario connection.
CommandOutcome run_geodesic(const Scenario& sc,
                            const std::filesystem::path& out_dir,
                            const RunOptions& opt = {});

}  // namespace weylkit
