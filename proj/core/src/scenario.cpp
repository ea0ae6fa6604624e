#include "weylkit/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "weylkit/errors.hpp"
#include "weylkit/report_json.hpp"

namespace weylkit {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) {
  throw Error("scenario: " + what);
}

// Deterministic re-serialization of the raw scenario document (fixed key
// order as given, 17-significant-digit floats) for embedding in reports.
void emit(const ojson& j, JsonWriter& w) {
  switch (j.type()) {
    case ojson::value_t::object:
      w.begin_object();
      for (auto it = j.begin(); it != j.end(); ++it) {
        w.key(it.key());
        emit(it.value(), w);
      }
      w.end_object();
      break;
    case ojson::value_t::array:
      w.begin_array();
      for (const auto& e : j) emit(e, w);
      w.end_array();
      break;
    case ojson::value_t::string:
      w.value(std::string_view(j.get_ref<const std::string&>()));
      break;
    case ojson::value_t::boolean:
      w.value(j.get<bool>());
      break;
    case ojson::value_t::number_integer:
      w.value(static_cast<std::int64_t>(j.get<std::int64_t>()));
      break;
    case ojson::value_t::number_unsigned:
      w.value(static_cast<std::uint64_t>(j.get<std::uint64_t>()));
      break;
    case ojson::value_t::number_float:
      w.value(j.get<double>());
      break;
    default:
      w.null();
      break;
  }
}

std::vector<double> parse_number_vector(const ojson& j, int want,
                                        const std::string& what) {
  if (!j.is_array() || (want >= 0 && static_cast<int>(j.size()) != want))
    bad(what + " must be an array of " + std::to_string(want) + " numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) bad(what + " must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::string> parse_string_vector(const ojson& j, int want,
                                             const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != want)
    bad(what + " must be an array of " + std::to_string(want) + " strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_string()) bad(what + " must contain strings only");
    out.push_back(e.get<std::string>());
  }
  return out;
}

OneFormSpec one_form_ref(const ojson& j, const Chart& chart,
                         const std::map<std::string, OneFormSpec>& named,
                         const std::string& what) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    const auto it = named.find(name);
    if (it == named.end()) bad(what + " references unknown one-form '" + name + "'");
    return it->second;
  }
  if (j.is_array()) {
    try {
      return OneFormSpec::from_strings(chart,
                                       parse_string_vector(j, chart.dim, what));
    } catch (const ParseError& e) {
      bad(what + ": " + e.what());
    }
  }
  bad(what + " must be a one-form name or an array of expressions");
}

ConnectionSpec explicit_connection(const ojson& j, const Chart& chart) {
  const int n = chart.dim;
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    bad("explicit connection must be a dim x dim x dim array of strings");
  std::vector<std::vector<std::vector<std::string>>> gamma;
  gamma.reserve(j.size());
  for (const auto& block : j) {
    if (!block.is_array() || static_cast<int>(block.size()) != n)
      bad("explicit connection must be a dim x dim x dim array of strings");
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : block)
      rows.push_back(parse_string_vector(row, n, "connection row"));
    gamma.push_back(std::move(rows));
  }
  try {
    return ConnectionSpec::from_strings(chart, gamma);
  } catch (const ParseError& e) {
    bad(std::string("connection: ") + e.what());
  } catch (const ShapeError& e) {
    bad(std::string("connection: ") + e.what());
  }
}

ConnectionProvider build_connection(const ojson& j, const Chart& chart,
                                    const MetricSpec& metric,
                                    const std::map<std::string, OneFormSpec>& named) {
  if (j.is_string()) {
    const auto kind = j.get<std::string>();
    if (kind == "levi_civita") return ConnectionProvider::levi_civita(metric);
    bad("unknown connection kind '" + kind + "'");
  }
  if (j.is_array())
    return ConnectionProvider::from_spec(explicit_connection(j, chart));
  if (!j.is_object() || j.size() != 1)
    bad("connection must be \"levi_civita\", an expression array, or an "
        "object with exactly one of: weyl, eps, projective_shift, explicit");
  const auto it = j.begin();
  const std::string kind = it.key();
  const ojson& val = it.value();
  if (kind == "explicit")
    return ConnectionProvider::from_spec(explicit_connection(val, chart));
  if (kind == "weyl") {
    const ojson& phi_ref =
        (val.is_object() && val.contains("phi")) ? val.at("phi") : val;
    return ConnectionProvider::weyl(
        metric, one_form_ref(phi_ref, chart, named, "connection.weyl.phi"));
  }
  if (kind == "eps") {
    if (!val.is_object() || !val.contains("phi") || !val.contains("eta"))
      bad("connection.eps needs {\"phi\": ..., \"eta\": ...}");
    return ConnectionProvider::eps(
        metric, one_form_ref(val.at("phi"), chart, named, "connection.eps.phi"),
        one_form_ref(val.at("eta"), chart, named, "connection.eps.eta"));
  }
  if (kind == "projective_shift") {
    if (!val.is_object() || !val.contains("base") || !val.contains("psi"))
      bad("connection.projective_shift needs {\"base\": ..., \"psi\": ...}");
    return ConnectionProvider::shifted(
        build_connection(val.at("base"), chart, metric, named),
        one_form_ref(val.at("psi"), chart, named,
                     "connection.projective_shift.psi"));
  }
  bad("unknown connection kind '" + kind + "'");
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    throw ParseError(std::string("scenario parse error: ") + e.what(), e.byte);
  }
  if (!j.is_object()) bad("root must be an object");

  static const std::set<std::string> allowed = {
      "chart", "metric", "connection", "one_forms",   "points",
      "geodesics", "tol", "samples", "seed", "geodesic_tol",
      "name", "description"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad("unknown field '" + it.key() + "'");

  // chart
  if (!j.contains("chart") || !j.at("chart").is_object())
    bad("missing \"chart\" object");
  const ojson& jc = j.at("chart");
  if (!jc.contains("dim") || !jc.at("dim").is_number_integer())
    bad("chart.dim must be an integer");
  const int dim = jc.at("dim").get<int>();
  if (dim < 2 || dim > 6) bad("chart.dim must lie in [2, 6]");
  Chart chart = Chart::standard(dim);
  if (jc.contains("coords"))
    chart = Chart::named(
        parse_string_vector(jc.at("coords"), dim, "chart.coords"));

  // metric
  if (!j.contains("metric")) bad("missing \"metric\"");
  const ojson& jm = j.at("metric");
  if (!jm.is_array() || static_cast<int>(jm.size()) != dim)
    bad("metric must be a dim x dim array of expression strings");
  std::vector<std::vector<std::string>> grid;
  grid.reserve(jm.size());
  for (const auto& row : jm)
    grid.push_back(parse_string_vector(row, dim, "metric row"));
  MetricSpec metric = [&] {
    try {
      return MetricSpec::from_strings(chart, grid);
    } catch (const ParseError& e) {
      bad(std::string("metric: ") + e.what());
    } catch (const ShapeError& e) {
      bad(std::string("metric: ") + e.what());
    }
  }();

  // named one-forms
  std::map<std::string, OneFormSpec> one_forms;
  if (j.contains("one_forms")) {
    const ojson& jf = j.at("one_forms");
    if (!jf.is_object()) bad("one_forms must be an object");
    for (auto it = jf.begin(); it != jf.end(); ++it) {
      try {
        one_forms.emplace(
            it.key(),
            OneFormSpec::from_strings(
                chart, parse_string_vector(it.value(), dim,
                                           "one_forms." + it.key())));
      } catch (const ParseError& e) {
        bad("one_forms." + it.key() + ": " + e.what());
      }
    }
  }

  // connection
  if (!j.contains("connection")) bad("missing \"connection\"");
  ConnectionProvider connection =
      build_connection(j.at("connection"), chart, metric, one_forms);

  // points
  std::vector<std::vector<double>> points;
  if (j.contains("points")) {
    const ojson& jp = j.at("points");
    if (!jp.is_array()) bad("points must be an array of points");
    for (const auto& p : jp)
      points.push_back(parse_number_vector(p, dim, "point"));
  }

  // geodesics
  std::vector<GeodesicRequest> geodesics;
  if (j.contains("geodesics")) {
    const ojson& jg = j.at("geodesics");
    if (!jg.is_array()) bad("geodesics must be an array");
    for (const auto& e : jg) {
      if (!e.is_object() || !e.contains("x0") || !e.contains("v0") ||
          !e.contains("steps") || !e.contains("h"))
        bad("each geodesic needs x0, v0, steps, h");
      GeodesicRequest req;
      req.x0 = parse_number_vector(e.at("x0"), dim, "geodesic.x0");
      req.v0 = parse_number_vector(e.at("v0"), dim, "geodesic.v0");
      if (!e.at("steps").is_number_integer() || e.at("steps").get<int>() < 1)
        bad("geodesic.steps must be a positive integer");
      req.steps = e.at("steps").get<int>();
      if (!e.at("h").is_number() || !(e.at("h").get<double>() > 0.0))
        bad("geodesic.h must be a positive number");
      req.h = e.at("h").get<double>();
      geodesics.push_back(std::move(req));
    }
  }

  double tol = 1e-8;
  if (j.contains("tol")) {
    if (!j.at("tol").is_number() || !(j.at("tol").get<double>() > 0.0))
      bad("tol must be a positive number");
    tol = j.at("tol").get<double>();
  }
  int samples = 0;
  if (j.contains("samples")) {
    if (!j.at("samples").is_number_integer() || j.at("samples").get<int>() < 0)
      bad("samples must be a non-negative integer");
    samples = j.at("samples").get<int>();
  }
  std::uint64_t seed = 0;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() && !j.at("seed").is_number_unsigned())
      bad("seed must be an integer");
    if (j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() < 0)
      bad("seed must be non-negative");
    seed = j.at("seed").get<std::uint64_t>();
  }
  double geodesic_tol = 1e-6;
  if (j.contains("geodesic_tol")) {
    if (!j.at("geodesic_tol").is_number() ||
        !(j.at("geodesic_tol").get<double>() > 0.0))
      bad("geodesic_tol must be a positive number");
    geodesic_tol = j.at("geodesic_tol").get<double>();
  }

  JsonWriter echo;
  emit(j, echo);

  return Scenario{std::move(chart),   std::move(metric), std::move(connection),
                  std::move(one_forms), std::move(points), std::move(geodesics),
                  tol,                samples,           seed,
                  geodesic_tol,       echo.str()};
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open scenario file '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace weylkit
