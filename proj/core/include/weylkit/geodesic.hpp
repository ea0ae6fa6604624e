#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "weylkit/geometry.hpp"

namespace weylkit {

struct TraceSample {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> v;
};

// Discrete geodesic: uniform parameter step, positions and velocities per
// sample, plus the connection the curve was integrated with.
struct GeodesicTrace {
  std::vector<TraceSample> samples;
  double h = 0.0;
  std::string connection_id;

  int dim() const {
    return samples.empty() ? 0 : static_cast<int>(samples.front().x.size());
  }
};

// Classical fixed-step RK4 on x'' = -Gamma(x)(x', x'). Throws
// IntegrationError (with the step index) on expression domain faults or a
// non-finite state.
GeodesicTrace integrate_geodesic(const ConnectionProvider& conn,
                                 std::span<const double> x0,
                                 std::span<const double> v0, int steps,
                                 double h);

// max over samples of |g(v,v) - g(v0,v0)|. For a null v0 this is the null
// norm itself; conserved along affinely parameterized Levi-Civita geodesics,
// so it measures integrator quality.
double null_norm_drift(const MetricSpec& g, const GeodesicTrace& trace);

// Transverse part of r = a + Gamma(v,v) relative to v (Euclidean projection;
// the metric one is singular on null curves), normalized by 1 + |r|, maxed
// over interior samples. a is the central-difference velocity derivative on
// the trace, so imported traces work too. Near zero iff the curve is an
// autoparallel of conn up to reparameterization.
double pregeodesic_residual(const ConnectionProvider& conn,
                            const GeodesicTrace& trace);

// CSV: header t,x0..x{n-1},v0..v{n-1}, one sample per row, 17 significant
// digits (bit-exact round trip).
void write_trace_csv(const GeodesicTrace& trace, std::ostream& out);
GeodesicTrace read_trace_csv(std::istream& in);

}  // namespace weylkit
