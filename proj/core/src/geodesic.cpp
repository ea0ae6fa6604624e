#include "weylkit/geodesic.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "weylkit/errors.hpp"
#include "weylkit/format.hpp"

namespace weylkit {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// a^i = -Gamma^i_{jk} v^j v^k
std::vector<double> acceleration(const ConnectionProvider& conn,
                                 const std::vector<double>& x,
                                 const std::vector<double>& v) {
  const PointTensor gamma = conn.at(x);
  const int n = gamma.dim();
  std::vector<double> a(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        s += gamma(i, j, k) * v[static_cast<std::size_t>(j)] *
             v[static_cast<std::size_t>(k)];
    a[static_cast<std::size_t>(i)] = -s;
  }
  return a;
}

bool all_finite(const std::vector<double>& v) {
  for (double c : v)
    if (!std::isfinite(c)) return false;
  return true;
}

}  // namespace

GeodesicTrace integrate_geodesic(const ConnectionProvider& conn,
                                 std::span<const double> x0,
                                 std::span<const double> v0, int steps,
                                 double h) {
  const int n = conn.chart().dim;
  if (static_cast<int>(x0.size()) != n || static_cast<int>(v0.size()) != n)
    throw ShapeError("initial data length does not match chart dimension");
  if (!(h > 0.0)) throw Error("step size must be positive");
  if (steps < 1) throw Error("step count must be >= 1");
  if (norm(v0) == 0.0) throw Error("initial velocity must be nonzero");

  GeodesicTrace trace;
  trace.h = h;
  trace.connection_id = conn.name();
  trace.samples.reserve(static_cast<std::size_t>(steps) + 1);

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> v(v0.begin(), v0.end());
  trace.samples.push_back({0.0, x, v});

  double t = 0.0;
  const std::size_t un = static_cast<std::size_t>(n);
  std::vector<double> xs(un), vs(un), kx1(un), kx2(un), kx3(un), kx4(un);
  std::vector<double> kv1, kv2, kv3, kv4;

  for (int step = 0; step < steps; ++step) {
    try {
      kx1 = v;
      kv1 = acceleration(conn, x, v);
      for (std::size_t i = 0; i < un; ++i) {
        xs[i] = x[i] + 0.5 * h * kx1[i];
        vs[i] = v[i] + 0.5 * h * kv1[i];
      }
      kx2 = vs;
      kv2 = acceleration(conn, xs, vs);
      for (std::size_t i = 0; i < un; ++i) {
        xs[i] = x[i] + 0.5 * h * kx2[i];
        vs[i] = v[i] + 0.5 * h * kv2[i];
      }
      kx3 = vs;
      kv3 = acceleration(conn, xs, vs);
      for (std::size_t i = 0; i < un; ++i) {
        xs[i] = x[i] + h * kx3[i];
        vs[i] = v[i] + h * kv3[i];
      }
      kx4 = vs;
      kv4 = acceleration(conn, xs, vs);
      for (std::size_t i = 0; i < un; ++i) {
        x[i] += h * ((kx1[i] + 2.0 * kx2[i] + 2.0 * kx3[i] + kx4[i]) / 6.0);
        v[i] += h * ((kv1[i] + 2.0 * kv2[i] + 2.0 * kv3[i] + kv4[i]) / 6.0);
      }
    } catch (const IntegrationError&) {
      throw;
    } catch (const Error& e) {
      throw IntegrationError("integration failed at step " +
                                 std::to_string(step) + ": " + e.what(),
                             step);
    }
    if (!all_finite(x) || !all_finite(v))
      throw IntegrationError(
          "non-finite state at step " + std::to_string(step), step);
    const double t_next = t + h;
    if (!(t_next > t))
      throw IntegrationError(
          "parameter step underflow at step " + std::to_string(step), step);
    t = t_next;
    trace.samples.push_back({t, x, v});
  }
  return trace;
}

double null_norm_drift(const MetricSpec& g, const GeodesicTrace& trace) {
  if (trace.samples.empty()) throw Error("empty trace");
  if (trace.dim() != g.chart().dim)
    throw ShapeError("trace dimension does not match metric chart");
  const auto& first = trace.samples.front();
  const double q0 = g.at(first.x).quad(first.v);
  double drift = 0.0;
  for (const auto& s : trace.samples) {
    const double q = g.at(s.x).quad(s.v);
    drift = std::max(drift, std::abs(q - q0));
  }
  return drift;
}

double pregeodesic_residual(const ConnectionProvider& conn,
                            const GeodesicTrace& trace) {
  if (trace.samples.size() < 3)
    throw Error("trace too short for central differences (need >= 3 samples)");
  if (trace.dim() != conn.chart().dim)
    throw ShapeError("trace dimension does not match connection chart");
  const int n = trace.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  const double h = trace.h;
  double worst = 0.0;
  for (std::size_t s = 1; s + 1 < trace.samples.size(); ++s) {
    const auto& prev = trace.samples[s - 1];
    const auto& cur = trace.samples[s];
    const auto& next = trace.samples[s + 1];
    const double vv = dot(cur.v, cur.v);
    if (vv == 0.0)
      throw Error("zero-velocity sample at index " + std::to_string(s));

    const PointTensor gamma = conn.at(cur.x);
    std::vector<double> r(un, 0.0);
    for (int i = 0; i < n; ++i) {
      double gvv = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          gvv += gamma(i, j, k) * cur.v[static_cast<std::size_t>(j)] *
                 cur.v[static_cast<std::size_t>(k)];
      const double a =
          (next.v[static_cast<std::size_t>(i)] - prev.v[static_cast<std::size_t>(i)]) /
          (2.0 * h);
      r[static_cast<std::size_t>(i)] = a + gvv;
    }
    // Euclidean-transverse part of r relative to v
    const double proj = dot(r, cur.v) / vv;
    double trans2 = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      const double c = r[i] - proj * cur.v[i];
      trans2 += c * c;
    }
    const double res = std::sqrt(trans2) / (1.0 + norm(r));
    worst = std::max(worst, res);
  }
  return worst;
}

void write_trace_csv(const GeodesicTrace& trace, std::ostream& out) {
  const int n = trace.dim();
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x" << i;
  for (int i = 0; i < n; ++i) out << ",v" << i;
  out << "\n";
  for (const auto& s : trace.samples) {
    out << format_double(s.t);
    for (double c : s.x) out << "," << format_double(c);
    for (double c : s.v) out << "," << format_double(c);
    out << "\n";
  }
}

GeodesicTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty trace CSV");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  const auto header = split(line);
  if (header.size() < 3 || header[0] != "t" || header.size() % 2 == 0)
    throw Error("malformed trace CSV header");
  const int n = static_cast<int>((header.size() - 1) / 2);
  for (int i = 0; i < n; ++i) {
    if (header[static_cast<std::size_t>(1 + i)] != "x" + std::to_string(i) ||
        header[static_cast<std::size_t>(1 + n + i)] != "v" + std::to_string(i))
      throw Error("malformed trace CSV header");
  }

  GeodesicTrace trace;
  trace.connection_id = "imported";
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw Error("trace CSV row " + std::to_string(row) +
                  " has wrong column count");
    std::vector<double> vals(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      vals[i] = std::strtod(cells[i].c_str(), &end);
      if (end != cells[i].c_str() + cells[i].size() || !std::isfinite(vals[i]))
        throw Error("trace CSV row " + std::to_string(row) +
                    ": malformed number '" + cells[i] + "'");
    }
    TraceSample s;
    s.t = vals[0];
    s.x.assign(vals.begin() + 1, vals.begin() + 1 + n);
    s.v.assign(vals.begin() + 1 + n, vals.end());
    trace.samples.push_back(std::move(s));
  }
  if (trace.samples.size() < 2)
    throw Error("trace CSV needs at least two samples");
  trace.h = trace.samples[1].t - trace.samples[0].t;
  if (!(trace.h > 0.0)) throw Error("trace parameter must be increasing");
  for (std::size_t s = 1; s < trace.samples.size(); ++s) {
    const double dt = trace.samples[s].t - trace.samples[s - 1].t;
    if (!(dt > 0.0)) throw Error("trace parameter must be strictly increasing");
    if (std::abs(dt - trace.h) >
        1e-9 * std::max(1.0, std::abs(trace.samples[s].t)))
      throw Error("trace parameter step is not uniform");
  }
  return trace;
}

}  // namespace weylkit
