#include <benchmark/benchmark.h>

#include <vector>

#include "neutomo/nmf.hpp"
#include "neutomo/rng.hpp"
#include "neutomo/routing.hpp"

using namespace neutomo;

static void BM_NmfComplete(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(9);
  GroundTruthTable index(n);
  std::vector<MeasuredPair> measured;
  for (std::size_t idx = 0; idx < index.size(); ++idx) {
    auto [u, v] = index.pair_at(idx);
    if (rng.uniform01() < 0.3) measured.push_back({u, v, rng.uniform(1.0, 40.0)});
  }
  NmfConfig config;
  config.max_iters = 200;
  config.tol = 0.0;
  for (auto _ : state) {
    NmfResult result = nmf_complete(measured, n, config);
    benchmark::DoNotOptimize(result.objective.data());
  }
}
BENCHMARK(BM_NmfComplete)->Arg(100)->Unit(benchmark::kMillisecond);
