#include "weylkit/compat.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "weylkit/format.hpp"
#include "weylkit/rng.hpp"

namespace weylkit {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::string point_string(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += format_double(p[i]);
  }
  return s + ")";
}

}  // namespace

int default_sample_count(int dim) { return 10 * dim * dim; }

std::vector<std::vector<double>> sample_null_vectors(const SymMatrix& gp,
                                                     int count,
                                                     std::uint64_t seed) {
  if (count < 1) throw Error("null sample count must be >= 1");
  const int n = gp.dim();
  const EigenSystem eig = jacobi_eigen(gp);

  double scale = 0.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));
  const double thr = degeneracy_threshold() * scale;
  double det = 1.0;
  for (double v : eig.values) det *= v;

  std::vector<int> pos, neg;
  for (int i = 0; i < n; ++i) {
    const double lambda = eig.values[static_cast<std::size_t>(i)];
    if (scale == 0.0 || std::abs(lambda) <= thr)
      throw DegenerateMetricError(
          "degenerate metric: eigenvalue below threshold", det);
    (lambda > 0.0 ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty())
    throw DefiniteSignatureError(
        "metric signature is definite; the null cone is empty");

  std::mt19937_64 gen(seed);
  auto eigenspace_unit = [&](const std::vector<int>& idxs) {
    const auto c = rng::unit_vector(gen, static_cast<int>(idxs.size()));
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    for (std::size_t t = 0; t < idxs.size(); ++t) {
      const auto& col = eig.vectors[static_cast<std::size_t>(idxs[t])];
      for (int i = 0; i < n; ++i)
        u[static_cast<std::size_t>(i)] += c[t] * col[static_cast<std::size_t>(i)];
    }
    return u;
  };

  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    const auto up = eigenspace_unit(pos);
    const auto um = eigenspace_unit(neg);
    // exact quadratics through the full matrix, so the cancellation also
    // absorbs eigenbasis rounding
    const double qpp = gp.quad(up);
    const double qmm = gp.quad(um);
    const auto gum = gp.apply(um);
    const double qpm = dot(up, gum);
    // positive root of qpp + 2 b qpm + b^2 qmm = 0 (qpp > 0 > qmm)
    const double b = (qpm + std::sqrt(qpm * qpm - qmm * qpp)) / (-qmm);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      v[static_cast<std::size_t>(i)] = up[static_cast<std::size_t>(i)] +
                                       b * um[static_cast<std::size_t>(i)];
    const double inv = 1.0 / norm(v);
    for (auto& c : v) c *= inv;
    out.push_back(std::move(v));
  }
  return out;
}

double nullcone_residual(const PointTensor& D, std::span<const double> v) {
  if (D.rank() != 3) throw ShapeError("difference tensor must have rank 3");
  const int n = D.dim();
  if (static_cast<int>(v.size()) != n)
    throw ShapeError("vector length does not match tensor dimension");
  const double vn = norm(v);
  if (vn == 0.0) throw Error("nullcone_residual of the zero vector");

  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        s += D(i, j, k) * v[static_cast<std::size_t>(j)] *
             v[static_cast<std::size_t>(k)];
    w[static_cast<std::size_t>(i)] = s;
  }
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int s = i + 1; s < n; ++s)
      m = std::max(m, std::abs(w[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(s)] -
                               w[static_cast<std::size_t>(s)] * v[static_cast<std::size_t>(i)]));
  return m / (vn * vn * vn);
}

std::vector<double> extract_phi(const PointTensor& D, const SymMatrix& gp) {
  if (D.rank() != 3) throw ShapeError("difference tensor must have rank 3");
  const int n = D.dim();
  if (gp.dim() != n) throw ShapeError("metric dimension mismatch");
  const SymMatrix ginv = gp.inverse();
  const PointTensor trace = D.contract(0, 1);  // D^s_{sk}
  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  const double coeff = static_cast<double>(n) - 2.0 / (n + 1);
  for (int i = 0; i < n; ++i) {
    double full = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) full += D(i, j, k) * ginv(j, k);
    double corr = 0.0;
    for (int k = 0; k < n; ++k) corr += ginv(i, k) * trace(k);
    phi[static_cast<std::size_t>(i)] = (full - 2.0 / (n + 1) * corr) / coeff;
  }
  return phi;
}

std::vector<double> extract_eta(const PointTensor& D,
                                std::span<const double> phi_vec,
                                const SymMatrix& gp) {
  if (D.rank() != 3) throw ShapeError("difference tensor must have rank 3");
  const int n = D.dim();
  if (gp.dim() != n || static_cast<int>(phi_vec.size()) != n)
    throw ShapeError("shape mismatch in extract_eta");
  const PointTensor trace = D.contract(0, 1);
  const auto phi_lower = gp.apply(phi_vec);
  std::vector<double> eta(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k)
    eta[static_cast<std::size_t>(k)] =
        (trace(k) - phi_lower[static_cast<std::size_t>(k)]) / (n + 1);
  return eta;
}

PointTensor normal_form_tensor(std::span<const double> phi_vec,
                               std::span<const double> eta,
                               const SymMatrix& gp) {
  const int n = gp.dim();
  if (static_cast<int>(phi_vec.size()) != n || static_cast<int>(eta.size()) != n)
    throw ShapeError("shape mismatch in normal_form_tensor");
  PointTensor d(3, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double v = phi_vec[static_cast<std::size_t>(i)] * gp(j, k);
        if (i == j) v += eta[static_cast<std::size_t>(k)];
        if (i == k) v += eta[static_cast<std::size_t>(j)];
        d(i, j, k) = v;
        d(i, k, j) = v;
      }
  d.declare_symmetry(1, 2);
  return d;
}

Decomposition decompose(const PointTensor& D, const SymMatrix& gp,
                        std::span<const double> point) {
  if (D.rank() != 3) throw ShapeError("difference tensor must have rank 3");
  if (D.dim() != gp.dim()) throw ShapeError("metric dimension mismatch");
  Decomposition dec;
  dec.phi_vec = extract_phi(D, gp);
  dec.eta = extract_eta(D, dec.phi_vec, gp);
  dec.residual = max_abs_diff(D, normal_form_tensor(dec.phi_vec, dec.eta, gp));
  dec.point.assign(point.begin(), point.end());
  dec.dim_below_theorem = D.dim() < 3;
  return dec;
}

PointAnalysis analyze_point(const MetricSpec& g, const ConnectionProvider& gamma,
                            std::span<const double> p, int samples, double tol,
                            std::uint64_t seed) {
  const int n = g.chart().dim;
  if (samples < 2 * n)
    throw Error("null sample count must be >= 2*dim (" +
                std::to_string(2 * n) + "), got " + std::to_string(samples));
  const SymMatrix gp = g.at(p);
  const PointTensor d = difference_tensor(gamma, g, p);
  const double scale = std::max(1.0, d.max_abs());

  PointAnalysis out;
  out.decomposition = decompose(d, gp, p);
  out.phi_lower = gp.apply(out.decomposition.phi_vec);

  double max_res = 0.0;
  for (const auto& v : sample_null_vectors(gp, samples, seed))
    max_res = std::max(max_res, nullcone_residual(d, v));

  CompatReport& rep = out.report;
  rep.point.assign(p.begin(), p.end());
  rep.samples_used = samples;
  rep.max_nullcone_residual = max_res;
  rep.decomposition_residual = out.decomposition.residual;
  rep.tol = tol;
  rep.d_scale = scale;
  rep.sampling_compatible = max_res <= tol * scale;
  rep.decomposition_compatible = out.decomposition.residual <= tol * scale;
  rep.compatible = rep.sampling_compatible && rep.decomposition_compatible;
  rep.dim_below_theorem = n < 3;
  return out;
}

CompatReport is_lightcone_compatible(const MetricSpec& g,
                                     const ConnectionProvider& gamma,
                                     std::span<const double> p, int samples,
                                     double tol, std::uint64_t seed) {
  return analyze_point(g, gamma, p, samples, tol, seed).report;
}

WeylizeResult weylize_full(const MetricSpec& g, const ConnectionProvider& gamma,
                           const std::vector<std::vector<double>>& points,
                           double tol, int samples, std::uint64_t seed) {
  const int n = g.chart().dim;
  if (n < 3) throw Error("weylize requires chart dimension >= 3");
  WeylizeResult res;
  res.compatible = true;
  double worst_ratio = -1.0;
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    PointAnalysis pa = analyze_point(g, gamma, points[idx], samples, tol,
                                     seed ^ static_cast<std::uint64_t>(idx));
    const double ratio =
        pa.decomposition.residual / pa.report.d_scale;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      res.worst_point_index = static_cast<int>(idx);
      res.worst_residual = pa.decomposition.residual;
    }
    res.compatible = res.compatible && pa.report.decomposition_compatible;
    res.phi.push_back(std::move(pa.phi_lower));
    res.decompositions.push_back(std::move(pa.decomposition));
    res.reports.push_back(std::move(pa.report));
  }
  return res;
}

std::pair<std::vector<std::vector<double>>, std::vector<CompatReport>> weylize(
    const MetricSpec& g, const ConnectionProvider& gamma,
    const std::vector<std::vector<double>>& points, double tol,
    std::uint64_t seed) {
  WeylizeResult res = weylize_full(g, gamma, points, tol,
                                   default_sample_count(g.chart().dim), seed);
  if (!res.compatible) {
    const auto& worst = points[static_cast<std::size_t>(res.worst_point_index)];
    throw IncompatibilityError(
        "connection is not light-cone compatible with the metric at point " +
            point_string(worst) + " (reconstruction residual " +
            format_double(res.worst_residual) + ")",
        worst, res.worst_residual, res.worst_point_index);
  }
  return {std::move(res.phi), std::move(res.reports)};
}

IntegrabilityResult integrability_check(
    const OneFormSpec& phi, const std::vector<std::vector<double>>& points,
    double tol) {
  const int n = phi.chart().dim;
  std::vector<ScalarExpr> curl;  // d_j phi_k - d_k phi_j for j < k
  curl.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      curl.push_back(phi.component(k).differentiate(j) -
                     phi.component(j).differentiate(k));
  IntegrabilityResult out;
  for (const auto& p : points)
    for (const auto& c : curl)
      out.max_curl = std::max(out.max_curl, std::abs(c.eval(p)));
  out.closed = out.max_curl <= tol;
  return out;
}

}  // namespace weylkit
