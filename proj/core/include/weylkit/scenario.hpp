#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "weylkit/geometry.hpp"

namespace weylkit {

struct GeodesicRequest {
  std::vector<double> x0;
  std::vector<double> v0;
  int steps = 0;
  double h = 0.0;
};

// A parsed scenario file: chart, metric, connection (explicit or induced),
// named one-forms, evaluation points, geodesic experiments and numeric
// knobs. `echo` is the input re-serialized deterministically; a report that
// embeds it is reproducible from the report alone.
struct Scenario {
  Chart chart;
  MetricSpec metric;
  ConnectionProvider connection;
  std::map<std::string, OneFormSpec> one_forms;
  std::vector<std::vector<double>> points;
  std::vector<GeodesicRequest> geodesics;
  double tol = 1e-8;
  int samples = 0;  // 0: default 10 dim^2
  std::uint64_t seed = 0;
  double geodesic_tol = 1e-6;
  std::string echo;
};

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& file);

}  // namespace weylkit
