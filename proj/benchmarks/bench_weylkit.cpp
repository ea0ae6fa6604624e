#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "weylkit/compat.hpp"
#include "weylkit/geodesic.hpp"
#include "weylkit/scenario.hpp"

using namespace weylkit;

namespace {

MetricSpec curved_metric(int n) {
  const Chart c = Chart::standard(n);
  std::vector<std::vector<std::string>> grid(
      static_cast<std::size_t>(n),
      std::vector<std::string>(static_cast<std::size_t>(n), "0"));
  for (int j = 0; j < n; ++j)
    grid[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] =
        (j == 0 ? "-1 - 0.05*sin(x1)" : "1 + 0.05*cos(x0)");
  grid[0][1] = grid[1][0] = "0.02*x2";
  return MetricSpec::from_strings(c, grid);
}

OneFormSpec sample_oneform(int n) {
  std::vector<std::string> comps(static_cast<std::size_t>(n), "0");
  comps[0] = "0.3*x1";
  comps[1] = "0.3*x0";
  return OneFormSpec::from_strings(Chart::standard(n), comps);
}

const std::vector<double> kPoint4{0.1, -0.2, 0.3, 0.05};

}  // namespace

static void BM_ParseExpression(benchmark::State& state) {
  const Chart chart = Chart::standard(4);
  for (auto _ : state) {
    auto e = ScalarExpr::parse("exp(0.2*x0)*sin(x1) + x2^3/(1 + x3^2)", chart);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_ParseExpression);

static void BM_EvalExpression(benchmark::State& state) {
  const Chart chart = Chart::standard(4);
  const auto e =
      ScalarExpr::parse("exp(0.2*x0)*sin(x1) + x2^3/(1 + x3^2)", chart);
  for (auto _ : state) benchmark::DoNotOptimize(e.eval(kPoint4));
}
BENCHMARK(BM_EvalExpression);

static void BM_DifferentiateAndEval(benchmark::State& state) {
  const Chart chart = Chart::standard(4);
  const auto e =
      ScalarExpr::parse("exp(0.2*x0)*sin(x1) + x2^3/(1 + x3^2)", chart);
  for (auto _ : state)
    benchmark::DoNotOptimize(e.differentiate(0).eval(kPoint4));
}
BENCHMARK(BM_DifferentiateAndEval);

static void BM_LeviCivita(benchmark::State& state) {
  const MetricSpec g = curved_metric(static_cast<int>(state.range(0)));
  std::vector<double> p(static_cast<std::size_t>(state.range(0)), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(levi_civita(g, p));
}
BENCHMARK(BM_LeviCivita)->Arg(3)->Arg(4)->Arg(6);

static void BM_WeylConnection(benchmark::State& state) {
  const MetricSpec g = curved_metric(4);
  const OneFormSpec phi = sample_oneform(4);
  for (auto _ : state)
    benchmark::DoNotOptimize(weyl_connection(g, phi, kPoint4));
}
BENCHMARK(BM_WeylConnection);

static void BM_SampleNullVectors(benchmark::State& state) {
  const SymMatrix gp = SymMatrix::minkowski(4);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sample_null_vectors(gp, static_cast<int>(state.range(0)), 42));
}
BENCHMARK(BM_SampleNullVectors)->Arg(40)->Arg(160);

static void BM_Decompose(benchmark::State& state) {
  const SymMatrix gp = SymMatrix::minkowski(4);
  const std::vector<double> phi{0.5, -0.2, 0.1, 0.3};
  const std::vector<double> eta{0.1, 0.4, -0.3, 0.2};
  const PointTensor d = normal_form_tensor(phi, eta, gp);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(d, gp));
}
BENCHMARK(BM_Decompose);

static void BM_AnalyzePoint(benchmark::State& state) {
  const MetricSpec g = curved_metric(4);
  const auto conn =
      ConnectionProvider::eps(g, sample_oneform(4), sample_oneform(4));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        analyze_point(g, conn, kPoint4, default_sample_count(4), 1e-8, 7));
}
BENCHMARK(BM_AnalyzePoint);

static void BM_IntegrateGeodesic(benchmark::State& state) {
  const MetricSpec g = curved_metric(4);
  const auto lc = ConnectionProvider::levi_civita(g);
  const std::vector<double> x0{0, 0, 0, 0};
  const std::vector<double> v0{1, 1, 0, 0};
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_geodesic(lc, x0, v0, steps, 1e-3));
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_IntegrateGeodesic)->Arg(100);

BENCHMARK_MAIN();
