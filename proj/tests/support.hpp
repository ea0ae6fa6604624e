// Shared test helpers: deterministic random field specs built as expression
// strings (so the parser is on the hot path of every randomized test), plus
// small numeric utilities.
#pragma once

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "weylkit/geometry.hpp"
#include "weylkit/rng.hpp"

namespace testsup {

inline std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.12g", v);
  return std::string(b);
}

inline int pick_coord(int n, std::mt19937_64& gen) {
  return static_cast<int>(gen() % static_cast<std::uint64_t>(n));
}

inline std::vector<double> random_point(int n, std::mt19937_64& gen,
                                        double box = 0.4) {
  std::vector<double> p(static_cast<std::size_t>(n));
  for (auto& c : p) c = weylkit::rng::uniform(gen, -box, box);
  return p;
}

// Perturbed-Minkowski metric with smooth expression coefficients; indefinite
// and well-conditioned for points inside |x| <= 0.5 at the default amplitude.
inline weylkit::MetricSpec random_metric(int n, std::mt19937_64& gen,
                                         double amp = 0.05) {
  using weylkit::rng::uniform;
  auto coord = [](int i) { return "x" + std::to_string(i); };
  std::vector<std::vector<std::string>> grid(
      static_cast<std::size_t>(n), std::vector<std::string>(static_cast<std::size_t>(n)));
  for (int j = 0; j < n; ++j) {
    const int a = pick_coord(n, gen);
    const int b = pick_coord(n, gen);
    std::string e = (j == 0) ? "-1" : "1";
    e += " + " + num(amp * uniform(gen, -1, 1)) + "*sin(" + coord(a) + ")";
    e += " + " + num(amp * uniform(gen, -1, 1)) + "*" + coord(b);
    grid[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = e;
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const int a = pick_coord(n, gen);
      const std::string e =
          num(0.5 * amp * uniform(gen, -1, 1)) + "*cos(" + coord(a) + ")";
      grid[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = e;
      grid[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = e;
    }
  return weylkit::MetricSpec::from_strings(weylkit::Chart::standard(n), grid);
}

inline weylkit::OneFormSpec random_oneform(int n, std::mt19937_64& gen,
                                           double amp = 0.8) {
  using weylkit::rng::uniform;
  auto coord = [](int i) { return "x" + std::to_string(i); };
  std::vector<std::string> comps;
  comps.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int a = pick_coord(n, gen);
    const int b = pick_coord(n, gen);
    comps.push_back(num(amp * uniform(gen, -1, 1)) + " + " +
                    num(amp * uniform(gen, -1, 1)) + "*" + coord(a) + " + " +
                    num(amp * uniform(gen, -1, 1)) + "*sin(" + coord(b) + ")");
  }
  return weylkit::OneFormSpec::from_strings(weylkit::Chart::standard(n), comps);
}

// Scale field lnOmega for conformal rescaling tests.
inline weylkit::ScalarExpr random_gauge_field(int n, std::mt19937_64& gen,
                                              double amp = 0.3) {
  using weylkit::rng::uniform;
  auto coord = [](int i) { return "x" + std::to_string(i); };
  const std::string text = num(amp * uniform(gen, -1, 1)) + "*" +
                           coord(pick_coord(n, gen)) + " + " +
                           num(amp * uniform(gen, -1, 1)) + "*sin(" +
                           coord(pick_coord(n, gen)) + ")";
  return weylkit::ScalarExpr::parse(text, weylkit::Chart::standard(n));
}

// Numeric indefinite matrix: Minkowski plus a small symmetric perturbation.
inline weylkit::SymMatrix random_indefinite(int n, std::mt19937_64& gen,
                                            double amp = 0.1) {
  weylkit::SymMatrix m = weylkit::SymMatrix::minkowski(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      m.set(i, j, m(i, j) + amp * weylkit::rng::uniform(gen, -1, 1));
  return m;
}

inline weylkit::SymMatrix random_spd(int n, std::mt19937_64& gen) {
  std::vector<std::vector<double>> b(
      static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (auto& row : b)
    for (auto& v : row) v = weylkit::rng::uniform(gen, -1, 1);
  weylkit::SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = (i == j) ? 0.1 : 0.0;  // keep it decisively positive
      for (int k = 0; k < n; ++k)
        s += b[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
             b[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      m.set(i, j, s);
    }
  return m;
}

inline double central_diff(const weylkit::ScalarExpr& e, int k,
                           std::vector<double> p, double h = 1e-6) {
  p[static_cast<std::size_t>(k)] += h;
  const double up = e.eval(p);
  p[static_cast<std::size_t>(k)] -= 2.0 * h;
  const double down = e.eval(p);
  return (up - down) / (2.0 * h);
}

inline double max_abs_vec_diff(const std::vector<double>& a,
                               const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_vec(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace testsup
