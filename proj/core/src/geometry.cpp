#include "weylkit/geometry.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace weylkit {

namespace {

std::size_t upper_index(int j, int k, int n) {
  if (j > k) std::swap(j, k);
  // row-major upper triangle: offset of row j plus (k - j)
  return static_cast<std::size_t>(j * n - j * (j - 1) / 2 + (k - j));
}

void check_point(const Chart& chart, std::span<const double> p) {
  if (static_cast<int>(p.size()) != chart.dim)
    throw ShapeError("point length " + std::to_string(p.size()) +
                     " does not match chart dimension " +
                     std::to_string(chart.dim));
}

// d_l g_{jk} for all l, j, k via exact symbolic partials.
std::vector<double> metric_partials(const MetricSpec& g,
                                    std::span<const double> p) {
  const int n = g.chart().dim;
  std::vector<double> dg(static_cast<std::size_t>(n) * n * n, 0.0);
  auto at = [&](int l, int j, int k) -> double& {
    return dg[(static_cast<std::size_t>(l) * n + static_cast<std::size_t>(j)) * n +
              static_cast<std::size_t>(k)];
  };
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const double v = g.entry(j, k).differentiate(l).eval(p);
        at(l, j, k) = v;
        at(l, k, j) = v;
      }
  return dg;
}

}  // namespace

// --- MetricSpec ---

MetricSpec::MetricSpec(Chart chart, std::vector<ScalarExpr> upper_entries)
    : chart_(std::move(chart)), e_(std::move(upper_entries)) {
  const std::size_t want =
      static_cast<std::size_t>(chart_.dim) * (chart_.dim + 1) / 2;
  if (e_.size() != want)
    throw ShapeError("metric needs " + std::to_string(want) +
                     " upper-triangle entries, got " + std::to_string(e_.size()));
}

MetricSpec MetricSpec::from_grid(const Chart& chart,
                                 const std::vector<std::vector<ScalarExpr>>& g) {
  const int n = chart.dim;
  if (static_cast<int>(g.size()) != n)
    throw ShapeError("metric grid must be dim x dim");
  std::vector<ScalarExpr> upper;
  upper.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(g[static_cast<std::size_t>(j)].size()) != n)
      throw ShapeError("metric grid must be dim x dim");
    for (int k = j; k < n; ++k) {
      const auto& ejk = g[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      const auto& ekj = g[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      if (ejk.to_string() != ekj.to_string())
        throw ShapeError("metric entries (" + std::to_string(j) + "," +
                         std::to_string(k) + ") and transposed differ");
      upper.push_back(ejk);
    }
  }
  return MetricSpec(chart, std::move(upper));
}

MetricSpec MetricSpec::from_strings(
    const Chart& chart, const std::vector<std::vector<std::string>>& g) {
  const int n = chart.dim;
  if (static_cast<int>(g.size()) != n)
    throw ShapeError("metric must be a dim x dim array");
  std::vector<ScalarExpr> upper;
  upper.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(g[static_cast<std::size_t>(j)].size()) != n)
      throw ShapeError("metric must be a dim x dim array");
    for (int k = j; k < n; ++k) {
      const auto& sjk = g[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      const auto& skj = g[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      if (sjk != skj)
        throw ShapeError("metric entry (" + std::to_string(j) + "," +
                         std::to_string(k) + ") = '" + sjk +
                         "' differs from its transpose '" + skj + "'");
      upper.push_back(ScalarExpr::parse(sjk, chart));
    }
  }
  return MetricSpec(chart, std::move(upper));
}

MetricSpec MetricSpec::diagonal(const Chart& chart, std::vector<ScalarExpr> d) {
  const int n = chart.dim;
  if (static_cast<int>(d.size()) != n)
    throw ShapeError("diagonal metric needs dim entries");
  std::vector<ScalarExpr> upper(static_cast<std::size_t>(n) * (n + 1) / 2,
                                ScalarExpr::constant(0.0));
  for (int j = 0; j < n; ++j)
    upper[upper_index(j, j, n)] = d[static_cast<std::size_t>(j)];
  return MetricSpec(chart, std::move(upper));
}

MetricSpec MetricSpec::minkowski(int dim) {
  const Chart chart = Chart::standard(dim);
  std::vector<ScalarExpr> d(static_cast<std::size_t>(dim),
                            ScalarExpr::constant(1.0));
  d[0] = ScalarExpr::constant(-1.0);
  return diagonal(chart, std::move(d));
}

const ScalarExpr& MetricSpec::entry(int j, int k) const {
  if (j < 0 || k < 0 || j >= chart_.dim || k >= chart_.dim)
    throw ShapeError("metric entry index out of range");
  return e_[upper_index(j, k, chart_.dim)];
}

SymMatrix MetricSpec::at(std::span<const double> p) const {
  check_point(chart_, p);
  const int n = chart_.dim;
  SymMatrix m(n);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) m.set(j, k, entry(j, k).eval(p));
  const double scale = m.max_abs();
  const double d = m.det();
  double limit = degeneracy_threshold();
  for (int i = 0; i < n; ++i) limit *= scale;
  if (scale == 0.0 || std::abs(d) <= limit)
    throw DegenerateMetricError("degenerate metric at evaluation point", d);
  return m;
}

// --- OneFormSpec ---

OneFormSpec::OneFormSpec(Chart chart, std::vector<ScalarExpr> components)
    : chart_(std::move(chart)), e_(std::move(components)) {
  if (static_cast<int>(e_.size()) != chart_.dim)
    throw ShapeError("one-form needs dim components");
}

OneFormSpec OneFormSpec::zero(const Chart& chart) {
  return OneFormSpec(chart, std::vector<ScalarExpr>(
                                static_cast<std::size_t>(chart.dim),
                                ScalarExpr::constant(0.0)));
}

OneFormSpec OneFormSpec::from_strings(const Chart& chart,
                                      const std::vector<std::string>& comps) {
  if (static_cast<int>(comps.size()) != chart.dim)
    throw ShapeError("one-form needs dim components");
  std::vector<ScalarExpr> e;
  e.reserve(comps.size());
  for (const auto& s : comps) e.push_back(ScalarExpr::parse(s, chart));
  return OneFormSpec(chart, std::move(e));
}

const ScalarExpr& OneFormSpec::component(int k) const {
  if (k < 0 || k >= chart_.dim) throw ShapeError("one-form index out of range");
  return e_[static_cast<std::size_t>(k)];
}

std::vector<double> OneFormSpec::at(std::span<const double> p) const {
  check_point(chart_, p);
  std::vector<double> out(e_.size());
  for (std::size_t k = 0; k < e_.size(); ++k) out[k] = e_[k].eval(p);
  return out;
}

// --- ConnectionSpec ---

ConnectionSpec::ConnectionSpec(Chart chart,
                               std::vector<ScalarExpr> lower_sym_entries)
    : chart_(std::move(chart)), e_(std::move(lower_sym_entries)) {
  const std::size_t want = static_cast<std::size_t>(chart_.dim) * chart_.dim *
                           (chart_.dim + 1) / 2;
  if (e_.size() != want)
    throw ShapeError("connection needs " + std::to_string(want) +
                     " lower-symmetric entries, got " + std::to_string(e_.size()));
}

ConnectionSpec ConnectionSpec::zero(const Chart& chart) {
  const std::size_t want =
      static_cast<std::size_t>(chart.dim) * chart.dim * (chart.dim + 1) / 2;
  return ConnectionSpec(chart,
                        std::vector<ScalarExpr>(want, ScalarExpr::constant(0.0)));
}

ConnectionSpec ConnectionSpec::from_strings(
    const Chart& chart,
    const std::vector<std::vector<std::vector<std::string>>>& gamma) {
  const int n = chart.dim;
  if (static_cast<int>(gamma.size()) != n)
    throw ShapeError("connection must be a dim x dim x dim array");
  std::vector<ScalarExpr> e;
  e.reserve(static_cast<std::size_t>(n) * n * (n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    const auto& block = gamma[static_cast<std::size_t>(i)];
    if (static_cast<int>(block.size()) != n)
      throw ShapeError("connection must be a dim x dim x dim array");
    for (int j = 0; j < n; ++j)
      if (static_cast<int>(block[static_cast<std::size_t>(j)].size()) != n)
        throw ShapeError("connection must be a dim x dim x dim array");
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const auto& sjk = block[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        const auto& skj = block[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        if (sjk != skj)
          throw ShapeError("connection entry (" + std::to_string(i) + "," +
                           std::to_string(j) + "," + std::to_string(k) +
                           ") is not symmetric in the lower indices");
        e.push_back(ScalarExpr::parse(sjk, chart));
      }
  }
  return ConnectionSpec(chart, std::move(e));
}

const ScalarExpr& ConnectionSpec::entry(int i, int j, int k) const {
  const int n = chart_.dim;
  if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k >= n)
    throw ShapeError("connection entry index out of range");
  const std::size_t per_i = static_cast<std::size_t>(n) * (n + 1) / 2;
  return e_[static_cast<std::size_t>(i) * per_i + upper_index(j, k, n)];
}

ScalarExpr& ConnectionSpec::entry_mut(int i, int j, int k) {
  return const_cast<ScalarExpr&>(
      static_cast<const ConnectionSpec&>(*this).entry(i, j, k));
}

PointTensor ConnectionSpec::at(std::span<const double> p) const {
  check_point(chart_, p);
  const int n = chart_.dim;
  PointTensor t(3, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const double v = entry(i, j, k).eval(p);
        t(i, j, k) = v;
        t(i, k, j) = v;
      }
  t.declare_symmetry(1, 2);
  return t;
}

// --- ConnectionProvider ---

struct ConnectionProvider::Impl {
  Chart chart;
  std::string name;
  std::function<PointTensor(std::span<const double>)> eval;
  std::optional<OneFormSpec> phi;
};

ConnectionProvider::ConnectionProvider(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

ConnectionProvider ConnectionProvider::from_spec(ConnectionSpec spec) {
  auto impl = std::make_shared<Impl>();
  impl->chart = spec.chart();
  impl->name = "explicit";
  impl->eval = [spec = std::move(spec)](std::span<const double> p) {
    return spec.at(p);
  };
  return ConnectionProvider(std::move(impl));
}

ConnectionProvider ConnectionProvider::levi_civita(MetricSpec g) {
  auto impl = std::make_shared<Impl>();
  impl->chart = g.chart();
  impl->name = "levi_civita";
  impl->eval = [g = std::move(g)](std::span<const double> p) {
    return weylkit::levi_civita(g, p);
  };
  return ConnectionProvider(std::move(impl));
}

ConnectionProvider ConnectionProvider::weyl(MetricSpec g, OneFormSpec phi) {
  if (g.chart() != phi.chart())
    throw ShapeError("metric and one-form live on different charts");
  auto impl = std::make_shared<Impl>();
  impl->chart = g.chart();
  impl->name = "weyl";
  impl->phi = phi;
  impl->eval = [g = std::move(g), phi = std::move(phi)](std::span<const double> p) {
    return weyl_connection(g, phi, p);
  };
  return ConnectionProvider(std::move(impl));
}

ConnectionProvider ConnectionProvider::eps(MetricSpec g, OneFormSpec phi,
                                           OneFormSpec eta) {
  if (g.chart() != phi.chart() || g.chart() != eta.chart())
    throw ShapeError("metric and one-forms live on different charts");
  auto impl = std::make_shared<Impl>();
  impl->chart = g.chart();
  impl->name = "eps";
  impl->phi = phi;
  impl->eval = [g = std::move(g), phi = std::move(phi),
                eta = std::move(eta)](std::span<const double> p) {
    return eps_connection(g, phi, eta, p);
  };
  return ConnectionProvider(std::move(impl));
}

ConnectionProvider ConnectionProvider::shifted(ConnectionProvider base,
                                               OneFormSpec psi) {
  if (base.chart() != psi.chart())
    throw ShapeError("connection and shift one-form live on different charts");
  auto impl = std::make_shared<Impl>();
  impl->chart = base.chart();
  impl->name = "projective_shift(" + base.name() + ")";
  impl->eval = [base = std::move(base),
                psi = std::move(psi)](std::span<const double> p) {
    PointTensor t = base.at(p);
    const auto pv = psi.at(p);
    const int n = t.dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double add = 0.0;
          if (i == j) add += pv[static_cast<std::size_t>(k)];
          if (i == k) add += pv[static_cast<std::size_t>(j)];
          if (add != 0.0) t(i, j, k) += add;
        }
    return t;
  };
  return ConnectionProvider(std::move(impl));
}

ConnectionProvider ConnectionProvider::from_function(
    Chart chart, std::string name,
    std::function<PointTensor(std::span<const double>)> eval) {
  auto impl = std::make_shared<Impl>();
  impl->chart = std::move(chart);
  impl->name = std::move(name);
  impl->eval = std::move(eval);
  return ConnectionProvider(std::move(impl));
}

PointTensor ConnectionProvider::at(std::span<const double> p) const {
  check_point(impl_->chart, p);
  return impl_->eval(p);
}

const Chart& ConnectionProvider::chart() const { return impl_->chart; }
const std::string& ConnectionProvider::name() const { return impl_->name; }

const OneFormSpec* ConnectionProvider::phi_spec() const {
  return impl_->phi ? &*impl_->phi : nullptr;
}

// --- WeylStructure ---

PointTensor WeylStructure::connection_at(std::span<const double> p) const {
  return weyl_connection(g, phi, p);
}

PointTensor WeylStructure::compatibility_residual(
    std::span<const double> p) const {
  return nabla_g_residual(g, connection_at(p), phi, p);
}

// --- point-level operations ---

SymMatrix metric_at(const MetricSpec& g, std::span<const double> p) {
  return g.at(p);
}

PointTensor levi_civita(const MetricSpec& g, std::span<const double> p) {
  const int n = g.chart().dim;
  check_point(g.chart(), p);
  const SymMatrix gp = g.at(p);
  const SymMatrix ginv = gp.inverse();
  const auto dg = metric_partials(g, p);
  auto DG = [&](int l, int j, int k) {
    return dg[(static_cast<std::size_t>(l) * n + static_cast<std::size_t>(j)) * n +
              static_cast<std::size_t>(k)];
  };
  PointTensor f(3, n);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(i, l) * (DG(j, l, k) + DG(k, l, j) - DG(l, j, k));
        f(i, j, k) = 0.5 * s;
        f(i, k, j) = 0.5 * s;
      }
  f.declare_symmetry(1, 2);
  return f;
}

PointTensor weyl_connection(const MetricSpec& g, const OneFormSpec& phi,
                            std::span<const double> p) {
  if (g.chart() != phi.chart())
    throw ShapeError("metric and one-form live on different charts");
  const int n = g.chart().dim;
  PointTensor gamma = levi_civita(g, p);
  const SymMatrix gp = g.at(p);
  const SymMatrix ginv = gp.inverse();
  const auto ph = phi.at(p);
  std::vector<double> phi_up(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += ginv(i, k) * ph[static_cast<std::size_t>(k)];
    phi_up[static_cast<std::size_t>(i)] = s;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double add = -gp(j, k) * phi_up[static_cast<std::size_t>(i)];
        if (i == j) add += ph[static_cast<std::size_t>(k)];
        if (i == k) add += ph[static_cast<std::size_t>(j)];
        gamma(i, j, k) += add;
        if (k != j) gamma(i, k, j) = gamma(i, j, k);
      }
  return gamma;
}

PointTensor nabla_g_residual(const MetricSpec& g, const PointTensor& gamma,
                             const OneFormSpec& phi, std::span<const double> p) {
  const int n = g.chart().dim;
  check_point(g.chart(), p);
  if (gamma.rank() != 3 || gamma.dim() != n)
    throw ShapeError("connection tensor shape mismatch");
  if (phi.chart() != g.chart())
    throw ShapeError("metric and one-form live on different charts");
  const SymMatrix gp = g.at(p);
  const auto dg = metric_partials(g, p);
  auto DG = [&](int l, int j, int k) {
    return dg[(static_cast<std::size_t>(l) * n + static_cast<std::size_t>(j)) * n +
              static_cast<std::size_t>(k)];
  };
  const auto ph = phi.at(p);
  PointTensor res(3, n);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = DG(l, j, k) + 2.0 * ph[static_cast<std::size_t>(l)] * gp(j, k);
        for (int m = 0; m < n; ++m)
          s -= gamma(m, l, j) * gp(m, k) + gamma(m, l, k) * gp(j, m);
        res(l, j, k) = s;
        res(l, k, j) = s;
      }
  res.declare_symmetry(1, 2);
  return res;
}

ConnectionSpec projective_shift(const ConnectionSpec& gamma,
                                const OneFormSpec& psi) {
  if (gamma.chart() != psi.chart())
    throw ShapeError("connection and one-form live on different charts");
  const int n = gamma.chart().dim;
  ConnectionSpec out = gamma;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        ScalarExpr e = gamma.entry(i, j, k);
        if (i == j) e = e + psi.component(k);
        if (i == k) e = e + psi.component(j);
        out.entry_mut(i, j, k) = e;
      }
  return out;
}

MetricSpec conformal_rescale(const MetricSpec& g, const ScalarExpr& ln_omega) {
  const int n = g.chart().dim;
  const ScalarExpr factor = exp(ScalarExpr::constant(2.0) * ln_omega);
  std::vector<ScalarExpr> upper;
  upper.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) upper.push_back(factor * g.entry(j, k));
  return MetricSpec(g.chart(), std::move(upper));
}

OneFormSpec gauge_transform(const OneFormSpec& phi, const ScalarExpr& ln_omega) {
  const int n = phi.chart().dim;
  std::vector<ScalarExpr> comps;
  comps.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    comps.push_back(phi.component(k) - ln_omega.differentiate(k));
  return OneFormSpec(phi.chart(), std::move(comps));
}

PointTensor difference_tensor(const ConnectionProvider& gamma,
                              const MetricSpec& g, std::span<const double> p) {
  if (gamma.chart() != g.chart())
    throw ShapeError("connection and metric live on different charts");
  PointTensor d = gamma.at(p) - levi_civita(g, p);
  d.declare_symmetry(1, 2, 0.0);
  return d;
}

PointTensor difference_tensor(const ConnectionSpec& gamma, const MetricSpec& g,
                              std::span<const double> p) {
  return difference_tensor(ConnectionProvider::from_spec(gamma), g, p);
}

PointTensor eps_connection(const MetricSpec& g, const OneFormSpec& phi,
                           const OneFormSpec& eta, std::span<const double> p) {
  if (g.chart() != phi.chart() || g.chart() != eta.chart())
    throw ShapeError("metric and one-forms live on different charts");
  const int n = g.chart().dim;
  PointTensor gamma = levi_civita(g, p);
  const SymMatrix gp = g.at(p);
  const SymMatrix ginv = gp.inverse();
  const auto ph = phi.at(p);
  const auto et = eta.at(p);
  std::vector<double> phi_up(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += ginv(i, k) * ph[static_cast<std::size_t>(k)];
    phi_up[static_cast<std::size_t>(i)] = s;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double add = phi_up[static_cast<std::size_t>(i)] * gp(j, k);
        if (i == k) add += et[static_cast<std::size_t>(j)];
        if (i == j) add += et[static_cast<std::size_t>(k)];
        gamma(i, j, k) += add;
        if (k != j) gamma(i, k, j) = gamma(i, j, k);
      }
  return gamma;
}

}  // namespace weylkit
