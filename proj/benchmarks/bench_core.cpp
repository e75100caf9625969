#include <benchmark/benchmark.h>

#include "covpair/distributions.hpp"
#include "covpair/numerics.hpp"
#include "covpair/params.hpp"
#include "covpair/rng.hpp"
#include "covpair/simulation.hpp"

using namespace covpair;

namespace {

const CovarianceStructure kRef = make_structure(0.5, 0.5);

void BM_BesselK(benchmark::State& state) {
  const BesselOrder order{static_cast<int>(state.range(0))};
  double x = 0.11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_k(order, x));
    x = x < 40.0 ? x * 1.37 : 0.11;
  }
}
BENCHMARK(BM_BesselK)->Arg(0)->Arg(1)->Arg(2)->Arg(5);

void BM_DensityGeneral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double x = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(density_general({kRef, n, x, 0.3 * x}));
    x = x > 4.0 ? -4.0 : x + 0.37;
  }
}
BENCHMARK(BM_DensityGeneral)->Arg(1)->Arg(2)->Arg(3)->Arg(8);

void BM_CfClosed(benchmark::State& state) {
  double u = -6.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cf_closed({kRef, 4, u, 1.3}));
    u = u > 6.0 ? -6.0 : u + 0.31;
  }
}
BENCHMARK(BM_CfClosed);

void BM_NormalDraws(benchmark::State& state) {
  SubstreamRng rng(42, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.next_normal());
  }
}
BENCHMARK(BM_NormalDraws);

void BM_SampleCovPairs(benchmark::State& state) {
  const SimulationPlan plan{kRef, 4, 10000, 7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_cov_pairs(plan));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SampleCovPairs)->Unit(benchmark::kMillisecond);

void BM_QuadrantProbability(benchmark::State& state) {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-7;
  cfg.rel_tol = 1e-6;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(quadrant_probability(kRef, n, 0.0, 0.0, cfg));
  }
}
BENCHMARK(BM_QuadrantProbability)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_InvertCf(benchmark::State& state) {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_cf(kRef, 3, 0.5, 0.25, cfg));
  }
}
BENCHMARK(BM_InvertCf)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
