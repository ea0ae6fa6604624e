#include "weylkit/commands.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "weylkit/compat.hpp"
#include "weylkit/geodesic.hpp"
#include "weylkit/report_json.hpp"
#include "weylkit/version.hpp"

namespace weylkit {

namespace {

struct Effective {
  double tol;
  int samples;
  std::uint64_t seed;
  double geodesic_tol;
};

Effective resolve(const Scenario& sc, const RunOptions& opt) {
  Effective e;
  e.tol = opt.tol.value_or(sc.tol);
  e.samples = opt.samples.value_or(sc.samples);
  if (e.samples <= 0) e.samples = default_sample_count(sc.chart.dim);
  e.seed = opt.seed.value_or(sc.seed);
  e.geodesic_tol = opt.geodesic_tol.value_or(sc.geodesic_tol);
  return e;
}

void emit_header(JsonWriter& w, const char* command, const Scenario& sc,
                 const Effective& e) {
  w.kv("tool", "weylkit");
  w.kv("version", kVersion);
  w.kv("command", command);
  w.key("scenario");
  w.raw(sc.echo);
  w.key("config");
  w.begin_object();
  w.kv("tol", e.tol);
  w.kv("samples", e.samples);
  w.kv("seed", e.seed);
  w.kv("geodesic_tol", e.geodesic_tol);
  w.kv("degeneracy_threshold", degeneracy_threshold());
  w.kv("connection", sc.connection.name());
  w.end_object();
}

void emit_point(JsonWriter& w, int index, const PointAnalysis& pa) {
  const CompatReport& r = pa.report;
  w.begin_object();
  w.kv("index", index);
  w.number_array("point", r.point);
  w.kv("samples_used", r.samples_used);
  w.kv("max_nullcone_residual", r.max_nullcone_residual);
  w.kv("decomposition_residual", r.decomposition_residual);
  w.kv("d_scale", r.d_scale);
  w.number_array("phi", pa.phi_lower);
  w.number_array("phi_upper", pa.decomposition.phi_vec);
  w.number_array("eta", pa.decomposition.eta);
  w.kv("sampling_compatible", r.sampling_compatible);
  w.kv("decomposition_compatible", r.decomposition_compatible);
  w.kv("dim_below_theorem", r.dim_below_theorem);
  w.kv("compatible", r.compatible);
  w.end_object();
}

}  // namespace

CommandOutcome run_check(const Scenario& sc, const RunOptions& opt) {
  const Effective e = resolve(sc, opt);
  std::vector<PointAnalysis> analyses;
  analyses.reserve(sc.points.size());
  for (std::size_t idx = 0; idx < sc.points.size(); ++idx) {
    try {
      analyses.push_back(analyze_point(sc.metric, sc.connection, sc.points[idx],
                                       e.samples, e.tol,
                                       e.seed ^ static_cast<std::uint64_t>(idx)));
    } catch (const Error& err) {
      throw Error("point " + std::to_string(idx) + ": " + err.what());
    }
  }
  bool all = true;
  for (const auto& pa : analyses) all = all && pa.report.compatible;

  JsonWriter w;
  w.begin_object();
  emit_header(w, "check", sc, e);
  w.key("points");
  w.begin_array();
  for (std::size_t idx = 0; idx < analyses.size(); ++idx)
    emit_point(w, static_cast<int>(idx), analyses[idx]);
  w.end_array();
  w.kv("compatible", all);
  w.end_object();
  return {all ? 0 : 2, w.str()};
}

CommandOutcome run_weylize(const Scenario& sc, const RunOptions& opt) {
  const Effective e = resolve(sc, opt);
  if (sc.chart.dim < 3) throw Error("weylize requires chart dimension >= 3");

  std::vector<PointAnalysis> analyses;
  analyses.reserve(sc.points.size());
  bool compatible = true;
  int worst_index = -1;
  double worst_residual = 0.0;
  double worst_ratio = -1.0;
  for (std::size_t idx = 0; idx < sc.points.size(); ++idx) {
    try {
      analyses.push_back(analyze_point(sc.metric, sc.connection, sc.points[idx],
                                       e.samples, e.tol,
                                       e.seed ^ static_cast<std::uint64_t>(idx)));
    } catch (const Error& err) {
      throw Error("point " + std::to_string(idx) + ": " + err.what());
    }
    const auto& pa = analyses.back();
    compatible = compatible && pa.report.decomposition_compatible;
    const double ratio = pa.report.decomposition_residual / pa.report.d_scale;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_index = static_cast<int>(idx);
      worst_residual = pa.report.decomposition_residual;
    }
  }

  // Integrability is reported when a symbolic phi is available: either the
  // connection was induced from one, or the scenario names a one-form "phi".
  const OneFormSpec* phi_spec = sc.connection.phi_spec();
  const char* phi_source = phi_spec ? "connection" : "";
  if (!phi_spec) {
    const auto it = sc.one_forms.find("phi");
    if (it != sc.one_forms.end()) {
      phi_spec = &it->second;
      phi_source = "one_forms.phi";
    }
  }

  JsonWriter w;
  w.begin_object();
  emit_header(w, "weylize", sc, e);
  w.key("points");
  w.begin_array();
  for (std::size_t idx = 0; idx < analyses.size(); ++idx)
    emit_point(w, static_cast<int>(idx), analyses[idx]);
  w.end_array();
  w.key("integrability");
  w.begin_object();
  w.kv("checked", phi_spec != nullptr);
  if (phi_spec != nullptr) {
    const IntegrabilityResult ir = integrability_check(*phi_spec, sc.points, e.tol);
    w.kv("source", phi_source);
    w.kv("closed", ir.closed);
    w.kv("max_curl", ir.max_curl);
  }
  w.end_object();
  w.kv("verdict", compatible ? "compatible" : "incompatible");
  if (!sc.points.empty()) {
    w.kv("worst_point_index", worst_index);
    w.kv("worst_residual", worst_residual);
  }
  w.end_object();
  return {compatible ? 0 : 2, w.str()};
}

CommandOutcome run_geodesic(const Scenario& sc,
                            const std::filesystem::path& out_dir,
                            const RunOptions& opt) {
  const Effective e = resolve(sc, opt);
  std::filesystem::create_directories(out_dir);

  const ConnectionProvider lc = ConnectionProvider::levi_civita(sc.metric);

  struct Row {
    std::string csv;
    int steps;
    double h;
    double initial_norm;
    double drift;
    double residual;
    bool within;
  };
  std::vector<Row> rows;
  rows.reserve(sc.geodesics.size());

  for (std::size_t idx = 0; idx < sc.geodesics.size(); ++idx) {
    const GeodesicRequest& req = sc.geodesics[idx];
    const GeodesicTrace trace =
        integrate_geodesic(lc, req.x0, req.v0, req.steps, req.h);

    char name[32];
    std::snprintf(name, sizeof name, "geodesic_%02zu.csv", idx);
    std::ofstream csv(out_dir / name, std::ios::binary);
    if (!csv) throw Error("cannot write trace file in '" + out_dir.string() + "'");
    write_trace_csv(trace, csv);

    Row row;
    row.csv = name;
    row.steps = req.steps;
    row.h = req.h;
    row.initial_norm = sc.metric.at(req.x0).quad(req.v0);
    row.drift = null_norm_drift(sc.metric, trace);
    row.residual = pregeodesic_residual(sc.connection, trace);
    row.within = row.residual <= e.geodesic_tol;
    rows.push_back(std::move(row));
  }

  bool all = true;
  for (const auto& r : rows) all = all && r.within;

  JsonWriter w;
  w.begin_object();
  emit_header(w, "geodesic", sc, e);
  w.key("geodesics");
  w.begin_array();
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const Row& r = rows[idx];
    w.begin_object();
    w.kv("index", static_cast<int>(idx));
    w.kv("csv", r.csv);
    w.kv("steps", r.steps);
    w.kv("h", r.h);
    w.kv("initial_null_norm", r.initial_norm);
    w.kv("null_norm_drift", r.drift);
    w.kv("pregeodesic_residual", r.residual);
    w.kv("within_tol", r.within);
    w.end_object();
  }
  w.end_array();
  w.kv("all_within_tol", all);
  w.end_object();

  const std::string report = w.str();
  std::ofstream summary(out_dir / "summary.json", std::ios::binary);
  if (!summary)
    throw Error("cannot write summary.json in '" + out_dir.string() + "'");
  summary << report << "\n";
  return {all ? 0 : 2, report};
}

}  // namespace weylkit
