#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "weylkit/geometry.hpp"

namespace weylkit {

// Result of splitting a difference tensor into the compatible normal form
// D^i_{jk} = phi^i g_{jk} + delta^i_j eta_k + delta^i_k eta_j. The residual
// is the L-infinity gap between D and the reconstruction; membership in the
// family is judged by the residual alone, phi/eta are always finite.
struct Decomposition {
  std::vector<double> phi_vec;  // upper index phi^i
  std::vector<double> eta;      // lower index eta_k
  double residual = 0.0;
  std::vector<double> point;    // where D was taken; may be empty
  bool dim_below_theorem = false;  // dim == 2: no theorem guarantee
};

// Per-point compatibility report. Verdicts compare residuals against
// tol * d_scale with d_scale = max(1, |D|_inf); `compatible` is the
// conjunction of the sampling and decomposition verdicts.
struct CompatReport {
  std::vector<double> point;
  int samples_used = 0;
  double max_nullcone_residual = 0.0;
  double decomposition_residual = 0.0;
  double tol = 0.0;
  double d_scale = 1.0;
  bool sampling_compatible = false;
  bool decomposition_compatible = false;
  bool compatible = false;
  bool dim_below_theorem = false;
};

struct PointAnalysis {
  CompatReport report;
  Decomposition decomposition;
  std::vector<double> phi_lower;  // phi_k = g_{ki} phi^i at the point
};

struct WeylizeResult {
  std::vector<std::vector<double>> phi;  // lower-index samples per point
  std::vector<Decomposition> decompositions;
  std::vector<CompatReport> reports;
  bool compatible = false;
  int worst_point_index = -1;   // argmax of residual / d_scale
  double worst_residual = 0.0;  // raw residual at that point
};

struct IntegrabilityResult {
  bool closed = false;
  double max_curl = 0.0;  // max |d_j phi_k - d_k phi_j| over points and j<k
};

// 10 n^2: generic sampling on the null quadric detects any non-family
// tensor with overwhelming probability at this count.
int default_sample_count(int dim);

// Euclidean-unit null vectors of gp, deterministic for a fixed seed. Each v
// satisfies |g(v,v)| <= 1e-12. Construction: eigen-split, a random unit
// direction in the positive and the negative eigenspace each, combined so
// the quadratic contributions cancel. Throws DefiniteSignatureError when
// the metric has no null cone.
std::vector<std::vector<double>> sample_null_vectors(const SymMatrix& gp,
                                                     int count,
                                                     std::uint64_t seed);

// max_{i,s} |w^i v^s - w^s v^i| / |v|^3 with w^i = D^i_{jk} v^j v^k: the
// antisymmetrized cubic defect, scale-free in v. Zero on the whole null
// cone iff D is in the compatible family; zero for every v iff D is pure
// trace.
double nullcone_residual(const PointTensor& D, std::span<const double> v);

// phi^i of the normal form via the trace-corrected contraction
//   (n - 2/(n+1)) phi^i
//     = (D^i_{jk} - (D^s_{sk} delta^i_j + D^s_{sj} delta^i_k)/(n+1)) g^{jk}.
std::vector<double> extract_phi(const PointTensor& D, const SymMatrix& gp);

// eta_k = (D^s_{sk} - g_{ks} phi^s) / (n+1).
std::vector<double> extract_eta(const PointTensor& D,
                                std::span<const double> phi_vec,
                                const SymMatrix& gp);

// phi^i g_{jk} + delta^i_j eta_k + delta^i_k eta_j as a numeric tensor.
PointTensor normal_form_tensor(std::span<const double> phi_vec,
                               std::span<const double> eta,
                               const SymMatrix& gp);

Decomposition decompose(const PointTensor& D, const SymMatrix& gp,
                        std::span<const double> point = {});

// Full per-point analysis: difference tensor, decomposition, null-cone
// sampling (requires samples >= 2 dim), verdicts.
PointAnalysis analyze_point(const MetricSpec& g, const ConnectionProvider& gamma,
                            std::span<const double> p, int samples, double tol,
                            std::uint64_t seed);

CompatReport is_lightcone_compatible(const MetricSpec& g,
                                     const ConnectionProvider& gamma,
                                     std::span<const double> p, int samples,
                                     double tol, std::uint64_t seed);

// Runs decompose on the difference tensor at every point (sampling runs as a
// cross-check; the decomposition verdict decides). Point k samples with seed
// XOR k so parallel and sequential execution agree. Never throws on
// incompatible input; inspect `compatible`.
WeylizeResult weylize_full(const MetricSpec& g, const ConnectionProvider& gamma,
                           const std::vector<std::vector<double>>& points,
                           double tol, int samples, std::uint64_t seed);

// Convenience wrapper: throws IncompatibilityError carrying the worst
// offending point; otherwise returns the lower-index phi samples defining
// the recovered Weyl structure plus the per-point reports.
std::pair<std::vector<std::vector<double>>, std::vector<CompatReport>> weylize(
    const MetricSpec& g, const ConnectionProvider& gamma,
    const std::vector<std::vector<double>>& points, double tol,
    std::uint64_t seed);

// Exact symbolic curl of phi evaluated at the sample points; closed iff the
// maximum is <= tol. A closed phi means the recovered Weyl structure is
// integrable (gauge-equivalent to a Riemannian one).
IntegrabilityResult integrability_check(
    const OneFormSpec& phi, const std::vector<std::vector<double>>& points,
    double tol);

}  // namespace weylkit
