#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weylkit/chart.hpp"
#include "weylkit/expr.hpp"
#include "weylkit/tensor.hpp"

namespace weylkit {

// Symmetric metric field g_{jk} on a chart, entries given as expressions.
// Symmetric by construction: only the upper triangle is stored.
class MetricSpec {
 public:
  MetricSpec(Chart chart, std::vector<ScalarExpr> upper_entries);
  static MetricSpec from_grid(const Chart& chart,
                              const std::vector<std::vector<ScalarExpr>>& g);
  static MetricSpec from_strings(
      const Chart& chart, const std::vector<std::vector<std::string>>& g);
  static MetricSpec diagonal(const Chart& chart, std::vector<ScalarExpr> d);
  static MetricSpec minkowski(int dim);  // diag(-1, 1, ..., 1)

  const Chart& chart() const noexcept { return chart_; }
  const ScalarExpr& entry(int j, int k) const;

  // Numeric value at a point; throws DegenerateMetricError when the value
  // matrix fails the degeneracy threshold, DomainError on evaluation faults.
  SymMatrix at(std::span<const double> p) const;

 private:
  Chart chart_;
  std::vector<ScalarExpr> e_;  // row-major upper triangle, j <= k
};

// One-form field (lower index) on a chart.
class OneFormSpec {
 public:
  OneFormSpec(Chart chart, std::vector<ScalarExpr> components);
  static OneFormSpec zero(const Chart& chart);
  static OneFormSpec from_strings(const Chart& chart,
                                  const std::vector<std::string>& comps);

  const Chart& chart() const noexcept { return chart_; }
  const ScalarExpr& component(int k) const;
  std::vector<double> at(std::span<const double> p) const;

 private:
  Chart chart_;
  std::vector<ScalarExpr> e_;
};

// Torsion-free connection coefficients Gamma^i_{jk}, symmetric in (j,k);
// only j <= k entries are stored.
class ConnectionSpec {
 public:
  ConnectionSpec(Chart chart, std::vector<ScalarExpr> lower_sym_entries);
  static ConnectionSpec zero(const Chart& chart);
  static ConnectionSpec from_strings(
      const Chart& chart,
      const std::vector<std::vector<std::vector<std::string>>>& gamma);

  const Chart& chart() const noexcept { return chart_; }
  const ScalarExpr& entry(int i, int j, int k) const;
  ScalarExpr& entry_mut(int i, int j, int k);

  PointTensor at(std::span<const double> p) const;  // rank 3, symmetric (1,2)

 private:
  Chart chart_;
  std::vector<ScalarExpr> e_;  // index (i, j<=k)
};

// A connection usable at any point: either an explicit ConnectionSpec or one
// induced from a metric (Levi-Civita, Weyl, EPS family) or a projective
// shift of another provider. This is what the theorem-level operations and
// the geodesic integrator consume.
class ConnectionProvider {
 public:
  static ConnectionProvider from_spec(ConnectionSpec spec);
  static ConnectionProvider levi_civita(MetricSpec g);
  static ConnectionProvider weyl(MetricSpec g, OneFormSpec phi);
  static ConnectionProvider eps(MetricSpec g, OneFormSpec phi, OneFormSpec eta);
  static ConnectionProvider shifted(ConnectionProvider base, OneFormSpec psi);
  static ConnectionProvider from_function(
      Chart chart, std::string name,
      std::function<PointTensor(std::span<const double>)> eval);

  PointTensor at(std::span<const double> p) const;
  const Chart& chart() const;
  const std::string& name() const;

  // The symbolic phi the connection was induced from (Weyl / EPS kinds),
  // nullptr otherwise. Used for the integrability report.
  const OneFormSpec* phi_spec() const;

 private:
  struct Impl;
  explicit ConnectionProvider(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// A metric together with a scale one-form; its induced connection is
// weyl_connection(g, phi) and satisfies grad g + 2 phi (x) g = 0.
struct WeylStructure {
  MetricSpec g;
  OneFormSpec phi;

  PointTensor connection_at(std::span<const double> p) const;
  // Residual of the compatibility identity at p; zero up to rounding.
  PointTensor compatibility_residual(std::span<const double> p) const;
};

// --- point-level operations ---

SymMatrix metric_at(const MetricSpec& g, std::span<const double> p);

// F^i_{jk} = 1/2 g^{il} (d_j g_{lk} + d_k g_{lj} - d_l g_{jk}), with exact
// symbolic partials of the metric entries.
PointTensor levi_civita(const MetricSpec& g, std::span<const double> p);

// Gamma^i_{jk} = F^i_{jk} + delta^i_j phi_k + delta^i_k phi_j - g_{jk} phi^i.
PointTensor weyl_connection(const MetricSpec& g, const OneFormSpec& phi,
                            std::span<const double> p);

// Componentwise d_l g_{jk} - Gamma^m_{lj} g_{mk} - Gamma^m_{lk} g_{jm}
// + 2 phi_l g_{jk}; the zero tensor (to rounding) iff Gamma is the Weyl
// connection of (g, phi).
PointTensor nabla_g_residual(const MetricSpec& g, const PointTensor& gamma,
                             const OneFormSpec& phi, std::span<const double> p);

// Gamma'^i_{jk} = Gamma^i_{jk} + delta^i_j psi_k + delta^i_k psi_j, built
// symbolically on the specs.
ConnectionSpec projective_shift(const ConnectionSpec& gamma,
                                const OneFormSpec& psi);

// g -> exp(2 lnOmega) g.
MetricSpec conformal_rescale(const MetricSpec& g, const ScalarExpr& ln_omega);

// phi -> phi - d lnOmega (exact differentiation).
OneFormSpec gauge_transform(const OneFormSpec& phi, const ScalarExpr& ln_omega);

// D^i_{jk} = Gamma^i_{jk} - F^i_{jk}(g) at p.
PointTensor difference_tensor(const ConnectionProvider& gamma,
                              const MetricSpec& g, std::span<const double> p);
PointTensor difference_tensor(const ConnectionSpec& gamma, const MetricSpec& g,
                              std::span<const double> p);

// Gamma^i_{jk} = F^i_{jk} + phi^i g_{jk} + eta_j delta^i_k + eta_k delta^i_j,
// phi supplied with lower index and raised internally. Light-cone compatible
// with [g] by construction.
PointTensor eps_connection(const MetricSpec& g, const OneFormSpec& phi,
                           const OneFormSpec& eta, std::span<const double> p);

}  // namespace weylkit
