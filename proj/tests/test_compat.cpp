#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "weylkit/compat.hpp"
#include "weylkit/rng.hpp"

#include "support.hpp"

using namespace weylkit;

namespace {

// Single-entry rank-3 tensor: the canonical off-family example.
PointTensor witness_tensor() {
  PointTensor d(3, 3);
  d(1, 1, 1) = 1.0;
  d.declare_symmetry(1, 2);
  return d;
}

ConnectionProvider witness_connection(const MetricSpec& g) {
  return ConnectionProvider::from_function(
      g.chart(), "witness", [g](std::span<const double> p) {
        PointTensor t = levi_civita(g, p);
        t(1, 1, 1) += 1.0;
        return t;
      });
}

}  // namespace

TEST_CASE("sample_null_vectors") {
  SUBCASE("Minkowski null cone") {
    const SymMatrix gp = SymMatrix::minkowski(4);
    const auto vs = sample_null_vectors(gp, 32, 5);
    REQUIRE(vs.size() == 32);
    for (const auto& v : vs) {
      double e2 = 0.0;
      for (double c : v) e2 += c * c;
      CHECK(std::abs(e2 - 1.0) <= 1e-12);
      CHECK(std::abs(gp.quad(v)) <= 1e-12);
      // (v^0)^2 equals the spatial square sum on the flat cone
      const double spatial = v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
      CHECK(v[0] * v[0] == doctest::Approx(spatial).epsilon(1e-10));
    }
  }

  SUBCASE("deterministic per seed") {
    const SymMatrix gp = SymMatrix::minkowski(3);
    const auto a = sample_null_vectors(gp, 8, 123);
    const auto b = sample_null_vectors(gp, 8, 123);
    const auto c = sample_null_vectors(gp, 8, 124);
    CHECK(a == b);
    CHECK(a != c);
  }

  SUBCASE("definite metrics have no null cone") {
    CHECK_THROWS_AS(sample_null_vectors(SymMatrix::identity(3), 4, 1),
                    DefiniteSignatureError);
  }

  SUBCASE("diag(-2, 3) rays") {
    const std::vector<double> d{-2, 3};
    const SymMatrix gp = SymMatrix::diagonal(d);
    for (const auto& v : sample_null_vectors(gp, 5, 9)) {
      CHECK(std::abs(gp.quad(v)) <= 1e-12);
      // proportional to (+-sqrt(3), sqrt(2)): |v0/v1| = sqrt(3/2)
      CHECK(std::abs(v[0] / v[1]) ==
            doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
    }
  }

  SUBCASE("count validation") {
    CHECK_THROWS_AS(sample_null_vectors(SymMatrix::minkowski(3), 0, 1),
                    Error);
  }
}

TEST_CASE("nullcone_residual") {
  SUBCASE("zero tensor") {
    const std::vector<double> v{1, 1, 0};
    CHECK(nullcone_residual(PointTensor(3, 3), v) == 0.0);
  }

  SUBCASE("pure trace vanishes for every vector, null or not") {
    const std::vector<double> eta{0.3, -0.2, 0.5};
    PointTensor d(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          d(i, j, k) = (i == j ? eta[static_cast<std::size_t>(k)] : 0.0) +
                       (i == k ? eta[static_cast<std::size_t>(j)] : 0.0);
    std::mt19937_64 gen(2);
    for (int t = 0; t < 20; ++t) {
      const auto v = testsup::random_point(3, gen, 2.0);
      if (testsup::max_abs_vec(v) == 0.0) continue;
      CHECK(nullcone_residual(d, v) <= 1e-15);
    }
  }

  SUBCASE("witness direction") {
    const std::vector<double> v{1, 1, 0};
    // w = (0, 1, 0); max |w^i v^s - w^s v^i| = 1; |v|^3 = 2 sqrt(2)
    CHECK(nullcone_residual(witness_tensor(), v) ==
          doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-15));
  }

  SUBCASE("zero vector is rejected") {
    const std::vector<double> z{0, 0, 0};
    CHECK_THROWS_AS(nullcone_residual(witness_tensor(), z), Error);
  }

  SUBCASE("a non-family tensor is visible off the null cone") {
    std::mt19937_64 gen(11);
    const SymMatrix gp = SymMatrix::minkowski(3);
    const std::vector<double> phi{0.7, 0.1, -0.4};
    const std::vector<double> eta{0, 0, 0};
    const PointTensor d = normal_form_tensor(phi, eta, gp);
    double best = 0.0;
    for (int t = 0; t < 50; ++t) {
      const auto v = testsup::random_point(3, gen, 1.0);
      if (testsup::max_abs_vec(v) < 0.1) continue;
      best = std::max(best, nullcone_residual(d, v));
    }
    CHECK(best > 1e-3);  // phi (x) g is not pure trace
  }
}

TEST_CASE("extract_phi") {
  const SymMatrix mink4 = SymMatrix::minkowski(4);

  SUBCASE("zero tensor") {
    const auto phi = extract_phi(PointTensor(3, 4), mink4);
    CHECK(testsup::max_abs_vec(phi) == 0.0);
  }

  SUBCASE("normal form with known coefficients") {
    const std::vector<double> phi{-1, 0, 0, 0};
    const std::vector<double> eta{0, 2, 0, 0};
    const PointTensor d = normal_form_tensor(phi, eta, mink4);
    const auto rec = extract_phi(d, mink4);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(rec[static_cast<std::size_t>(i)] -
                     phi[static_cast<std::size_t>(i)]) <= 1e-12);
  }

  SUBCASE("pure trace extracts to zero") {
    const std::vector<double> phi{0, 0, 0, 0};
    const std::vector<double> eta{1.5, -2, 0.25, 3};
    const PointTensor d = normal_form_tensor(phi, eta, mink4);
    CHECK(testsup::max_abs_vec(extract_phi(d, mink4)) <= 1e-14);
  }
}

TEST_CASE("extract_eta") {
  const SymMatrix mink3 = SymMatrix::minkowski(3);

  SUBCASE("zero data") {
    const std::vector<double> zero{0, 0, 0};
    CHECK(testsup::max_abs_vec(extract_eta(PointTensor(3, 3), zero, mink3)) ==
          0.0);
  }

  SUBCASE("round trip over random indefinite metrics") {
    std::mt19937_64 gen(19);
    for (int n : {3, 4, 5}) {
      for (int trial = 0; trial < 10; ++trial) {
        const SymMatrix gp = testsup::random_indefinite(n, gen);
        std::vector<double> phi(static_cast<std::size_t>(n)), eta(static_cast<std::size_t>(n));
        for (auto& c : phi) c = rng::uniform(gen, -2, 2);
        for (auto& c : eta) c = rng::uniform(gen, -2, 2);
        const PointTensor d = normal_form_tensor(phi, eta, gp);
        const auto phi_rec = extract_phi(d, gp);
        const auto eta_rec = extract_eta(d, phi_rec, gp);
        CHECK(testsup::max_abs_vec_diff(phi_rec, phi) <= 1e-10);
        CHECK(testsup::max_abs_vec_diff(eta_rec, eta) <= 1e-10);
      }
    }
  }

  SUBCASE("pure trace trace identity with n + 1") {
    const std::vector<double> phi{0, 0, 0};
    const std::vector<double> eta{1, 1, 0};
    const PointTensor d = normal_form_tensor(phi, eta, mink3);
    const auto phi_rec = extract_phi(d, mink3);
    const auto eta_rec = extract_eta(d, phi_rec, mink3);
    CHECK(eta_rec[0] == 1.0);
    CHECK(eta_rec[1] == 1.0);
    CHECK(eta_rec[2] == 0.0);
  }
}

TEST_CASE("decompose") {
  const SymMatrix mink3 = SymMatrix::minkowski(3);

  SUBCASE("zero tensor") {
    const Decomposition dec = decompose(PointTensor(3, 3), mink3);
    CHECK(testsup::max_abs_vec(dec.phi_vec) == 0.0);
    CHECK(testsup::max_abs_vec(dec.eta) == 0.0);
    CHECK(dec.residual == 0.0);
    CHECK_FALSE(dec.dim_below_theorem);
  }

  SUBCASE("the single-entry counterexample is far from the family") {
    const Decomposition dec = decompose(witness_tensor(), mink3);
    CHECK(dec.residual > 0.1);
    CHECK(dec.residual == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(dec.phi_vec[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(dec.eta[1] == doctest::Approx(0.2).epsilon(1e-12));
  }

  SUBCASE("least-squares oracle bounds the family distance from below") {
    // Fit phi (x) g + delta eta + delta eta to the witness by normal
    // equations over all 27 entries; even the optimal fit stays far away.
    const int n = 3;
    const int cols = 2 * n;
    std::vector<std::vector<double>> a;  // 27 x 6
    for (int c = 0; c < cols; ++c) {
      std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
      std::vector<double> eta(static_cast<std::size_t>(n), 0.0);
      if (c < n)
        phi[static_cast<std::size_t>(c)] = 1.0;
      else
        eta[static_cast<std::size_t>(c - n)] = 1.0;
      const PointTensor base = normal_form_tensor(phi, eta, mink3);
      a.emplace_back(base.data().begin(), base.data().end());
    }
    const PointTensor w = witness_tensor();
    const std::vector<double> b(w.data().begin(), w.data().end());

    SymMatrix gram(cols);
    std::vector<double> rhs(static_cast<std::size_t>(cols), 0.0);
    for (int i = 0; i < cols; ++i) {
      for (int j = i; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < b.size(); ++t)
          s += a[static_cast<std::size_t>(i)][t] * a[static_cast<std::size_t>(j)][t];
        gram.set(i, j, s);
      }
      for (std::size_t t = 0; t < b.size(); ++t)
        rhs[static_cast<std::size_t>(i)] += a[static_cast<std::size_t>(i)][t] * b[t];
    }
    const auto x = gram.inverse().apply(rhs);

    double l2 = 0.0;
    double linf = 0.0;
    for (std::size_t t = 0; t < b.size(); ++t) {
      double fit = 0.0;
      for (int c = 0; c < cols; ++c)
        fit += x[static_cast<std::size_t>(c)] * a[static_cast<std::size_t>(c)][t];
      const double r = b[t] - fit;
      l2 += r * r;
      linf = std::max(linf, std::abs(r));
    }
    // optimal L2 residual computed by hand: |r|_2^2 = 0.4
    CHECK(l2 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(linf > 0.1);
    // lower bound on the minimal L-infinity residual over ALL (phi, eta)
    CHECK(std::sqrt(l2 / static_cast<double>(b.size())) > 0.1);
    // the closed-form extraction agrees with the optimal fit here
    CHECK(x[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(x[4] == doctest::Approx(0.2).epsilon(1e-12));
  }

  SUBCASE("dim 2 runs but is flagged") {
    const SymMatrix m2 = SymMatrix::minkowski(2);
    const Decomposition dec = decompose(PointTensor(3, 2), m2);
    CHECK(dec.dim_below_theorem);
    CHECK(dec.residual == 0.0);
  }
}

TEST_CASE("analyze_point and is_lightcone_compatible") {
  std::mt19937_64 gen(53);

  SUBCASE("EPS-built connections are compatible") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 3 + (trial % 2);
      const MetricSpec g = testsup::random_metric(n, gen);
      const OneFormSpec phi = testsup::random_oneform(n, gen);
      const OneFormSpec eta = testsup::random_oneform(n, gen);
      const auto p = testsup::random_point(n, gen);
      const CompatReport rep = is_lightcone_compatible(
          g, ConnectionProvider::eps(g, phi, eta), p, default_sample_count(n),
          1e-8, 100 + static_cast<std::uint64_t>(trial));
      CHECK(rep.compatible);
      CHECK(rep.sampling_compatible);
      CHECK(rep.decomposition_compatible);
      CHECK(rep.max_nullcone_residual <= 1e-9 * rep.d_scale);
      CHECK(rep.decomposition_residual <= 1e-9 * rep.d_scale);
    }
  }

  SUBCASE("Levi-Civita is compatible with zero residual") {
    const MetricSpec g = testsup::random_metric(4, gen);
    const auto p = testsup::random_point(4, gen);
    const CompatReport rep = is_lightcone_compatible(
        g, ConnectionProvider::levi_civita(g), p, 160, 1e-8, 1);
    CHECK(rep.compatible);
    CHECK(rep.max_nullcone_residual == 0.0);
    CHECK(rep.decomposition_residual == 0.0);
  }

  SUBCASE("the witness connection is flagged within 100 samples") {
    const MetricSpec g = MetricSpec::minkowski(3);
    const std::vector<double> p{0, 0, 0};
    const CompatReport rep =
        is_lightcone_compatible(g, witness_connection(g), p, 100, 1e-8, 0);
    CHECK_FALSE(rep.compatible);
    CHECK_FALSE(rep.sampling_compatible);
    CHECK(rep.decomposition_residual > 0.1);
  }

  SUBCASE("sample count precondition") {
    const MetricSpec g = MetricSpec::minkowski(3);
    const std::vector<double> p{0, 0, 0};
    CHECK_THROWS_AS(
        is_lightcone_compatible(g, ConnectionProvider::levi_civita(g), p, 5,
                                1e-8, 0),
        Error);
  }
}

TEST_CASE("weylize") {
  std::mt19937_64 gen(59);

  SUBCASE("EPS round trip recovers the scenario phi") {
    const int n = 4;
    const MetricSpec g = testsup::random_metric(n, gen);
    const OneFormSpec phi = testsup::random_oneform(n, gen);
    const OneFormSpec eta = testsup::random_oneform(n, gen);
    std::vector<std::vector<double>> points;
    for (int t = 0; t < 4; ++t) points.push_back(testsup::random_point(n, gen));
    const auto [phis, reports] = weylize(
        g, ConnectionProvider::eps(g, phi, eta), points, 1e-8, 2024);
    REQUIRE(phis.size() == points.size());
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
      const auto expect = phi.at(points[idx]);
      CHECK(testsup::max_abs_vec_diff(phis[idx], expect) <=
            1e-8 * (1.0 + testsup::max_abs_vec(expect)));
      CHECK(reports[idx].compatible);
    }
  }

  SUBCASE("a Weyl-induced connection recovers the opposite-sign form") {
    // The induced connection equals the EPS family member with the phi slot
    // negated and the trace slot equal to phi, so the recovered one-form is
    // the negative of the inducing one.
    const int n = 4;
    const MetricSpec g = testsup::random_metric(n, gen);
    const OneFormSpec phi0 = testsup::random_oneform(n, gen);
    std::vector<std::vector<double>> points{testsup::random_point(n, gen),
                                            testsup::random_point(n, gen)};
    const auto [phis, reports] =
        weylize(g, ConnectionProvider::weyl(g, phi0), points, 1e-8, 11);
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
      auto expect = phi0.at(points[idx]);
      for (auto& c : expect) c = -c;
      CHECK(testsup::max_abs_vec_diff(phis[idx], expect) <=
            1e-8 * (1.0 + testsup::max_abs_vec(expect)));
    }
  }

  SUBCASE("Levi-Civita weylizes to zero") {
    const MetricSpec g = testsup::random_metric(3, gen);
    std::vector<std::vector<double>> points{testsup::random_point(3, gen)};
    const auto [phis, reports] =
        weylize(g, ConnectionProvider::levi_civita(g), points, 1e-8, 0);
    CHECK(testsup::max_abs_vec(phis[0]) == 0.0);
  }

  SUBCASE("incompatible input raises with the worst point") {
    const MetricSpec g = MetricSpec::minkowski(3);
    std::vector<std::vector<double>> points{{0, 0, 0}, {0.1, 0.2, 0.3}};
    try {
      weylize(g, witness_connection(g), points, 1e-8, 0);
      FAIL("expected IncompatibilityError");
    } catch (const IncompatibilityError& e) {
      CHECK(e.residual() > 0.1);
      CHECK(e.point_index() >= 0);
      CHECK(e.point().size() == 3);
    }
  }

  SUBCASE("dimension 2 is rejected") {
    const MetricSpec g = MetricSpec::minkowski(2);
    std::vector<std::vector<double>> points{{0, 0}};
    CHECK_THROWS_AS(
        weylize(g, ConnectionProvider::levi_civita(g), points, 1e-8, 0), Error);
  }
}

TEST_CASE("integrability_check") {
  const Chart c3 = Chart::standard(3);
  std::mt19937_64 gen(61);
  std::vector<std::vector<double>> points;
  for (int t = 0; t < 5; ++t) points.push_back(testsup::random_point(3, gen, 1.0));

  SUBCASE("exact form is closed with curl exactly zero") {
    const OneFormSpec phi = OneFormSpec::from_strings(c3, {"x1", "x0", "0"});
    const IntegrabilityResult r = integrability_check(phi, points, 1e-12);
    CHECK(r.closed);
    CHECK(r.max_curl == 0.0);
  }

  SUBCASE("non-closed form reports curl 1 everywhere") {
    const OneFormSpec phi = OneFormSpec::from_strings(c3, {"x1", "0", "0"});
    const IntegrabilityResult r = integrability_check(phi, points, 1e-12);
    CHECK_FALSE(r.closed);
    CHECK(r.max_curl == 1.0);
  }

  SUBCASE("zero form is closed") {
    const IntegrabilityResult r =
        integrability_check(OneFormSpec::zero(c3), points, 1e-12);
    CHECK(r.closed);
    CHECK(r.max_curl == 0.0);
  }
}

TEST_CASE("property: normal-form round trip across dimensions and seeds") {
  for (int n : {3, 4, 5}) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      std::mt19937_64 gen(seed * 1000 + static_cast<std::uint64_t>(n));
      const MetricSpec g = testsup::random_metric(n, gen, 0.04);
      const OneFormSpec phi = testsup::random_oneform(n, gen);
      const OneFormSpec eta = testsup::random_oneform(n, gen);
      const auto p = testsup::random_point(n, gen);
      const SymMatrix gp = metric_at(g, p);
      const PointTensor d =
          difference_tensor(ConnectionProvider::eps(g, phi, eta), g, p);
      const Decomposition dec = decompose(d, gp, p);
      const auto phi_up_expect = gp.inverse().apply(phi.at(p));
      const auto eta_expect = eta.at(p);
      const double s = 1.0 + testsup::max_abs_vec(phi_up_expect);
      CHECK(testsup::max_abs_vec_diff(dec.phi_vec, phi_up_expect) <= 1e-8 * s);
      CHECK(testsup::max_abs_vec_diff(dec.eta, eta_expect) <=
            1e-8 * (1.0 + testsup::max_abs_vec(eta_expect)));
      CHECK(dec.residual <= 1e-8 * std::max(1.0, d.max_abs()));
    }
  }
}

TEST_CASE("property: pure-trace shifts are invisible to phi") {
  std::mt19937_64 gen(67);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + (trial % 2);
    const SymMatrix gp = testsup::random_indefinite(n, gen);
    std::vector<double> phi(static_cast<std::size_t>(n)), eta(static_cast<std::size_t>(n)),
        psi(static_cast<std::size_t>(n));
    for (auto& c : phi) c = rng::uniform(gen, -1, 1);
    for (auto& c : eta) c = rng::uniform(gen, -1, 1);
    for (auto& c : psi) c = rng::uniform(gen, -1, 1);
    const PointTensor d = normal_form_tensor(phi, eta, gp);
    std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    const PointTensor shifted = d + normal_form_tensor(zero, psi, gp);
    const Decomposition a = decompose(d, gp);
    const Decomposition b = decompose(shifted, gp);
    CHECK(testsup::max_abs_vec_diff(a.phi_vec, b.phi_vec) <= 1e-9);
    std::vector<double> eta_shifted = a.eta;
    for (int k = 0; k < n; ++k)
      eta_shifted[static_cast<std::size_t>(k)] += psi[static_cast<std::size_t>(k)];
    CHECK(testsup::max_abs_vec_diff(b.eta, eta_shifted) <= 1e-12);
  }
}

TEST_CASE("property: decomposition is scale-equivariant") {
  std::mt19937_64 gen(71);
  const SymMatrix gp = testsup::random_indefinite(4, gen);
  std::vector<double> phi(4), eta(4);
  for (auto& v : phi) v = rng::uniform(gen, -1, 1);
  for (auto& v : eta) v = rng::uniform(gen, -1, 1);
  PointTensor d = normal_form_tensor(phi, eta, gp);
  // push it off the family so the residual is nonzero
  d(1, 1, 1) += 0.5;
  d(2, 0, 1) += 0.25;
  d(2, 1, 0) += 0.25;
  const Decomposition base = decompose(d, gp);
  for (double c : {2.0, -3.0, 0.125}) {
    PointTensor scaled = d;
    for (auto& v : scaled.data()) v *= c;
    const Decomposition dec = decompose(scaled, gp);
    for (int i = 0; i < 4; ++i) {
      CHECK(dec.phi_vec[static_cast<std::size_t>(i)] ==
            doctest::Approx(c * base.phi_vec[static_cast<std::size_t>(i)])
                .epsilon(1e-12));
      CHECK(dec.eta[static_cast<std::size_t>(i)] ==
            doctest::Approx(c * base.eta[static_cast<std::size_t>(i)])
                .epsilon(1e-12));
    }
    CHECK(dec.residual ==
          doctest::Approx(std::abs(c) * base.residual).epsilon(1e-12));
  }
}

TEST_CASE("property: sampling and decomposition verdicts agree off the band") {
  std::mt19937_64 gen(73);
  int band = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + (trial % 2);
    const MetricSpec g = testsup::random_metric(n, gen, 0.04);
    const OneFormSpec phi = testsup::random_oneform(n, gen, 0.5);
    const OneFormSpec eta = testsup::random_oneform(n, gen, 0.5);
    ConnectionProvider conn = ConnectionProvider::eps(g, phi, eta);
    if (trial % 2 == 1) {
      const double c = 3e-3 * std::pow(10.0, rng::uniform(gen, 0.0, 2.0));
      const int i0 = testsup::pick_coord(n, gen);
      const int j0 = testsup::pick_coord(n, gen);
      const int k0 = testsup::pick_coord(n, gen);
      conn = ConnectionProvider::from_function(
          g.chart(), "perturbed",
          [base = conn, c, i0, j0, k0](std::span<const double> p) {
            PointTensor t = base.at(p);
            t(i0, j0, k0) += c;
            if (j0 != k0) t(i0, k0, j0) += c;
            return t;
          });
    }
    const auto p = testsup::random_point(n, gen);
    const CompatReport rep = is_lightcone_compatible(
        g, conn, p, default_sample_count(n), 1e-8,
        static_cast<std::uint64_t>(trial));
    const double rs = rep.max_nullcone_residual / rep.d_scale;
    const double rd = rep.decomposition_residual / rep.d_scale;
    const bool in_band = (rs > 1e-9 && rs < 1e-7) || (rd > 1e-9 && rd < 1e-7);
    if (in_band) {
      ++band;
      continue;
    }
    CHECK(rep.sampling_compatible == rep.decomposition_compatible);
    CHECK(rep.sampling_compatible == (trial % 2 == 0));
  }
  CHECK(band == 0);
}
