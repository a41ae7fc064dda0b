#include <benchmark/benchmark.h>

#include "neutomo/routing.hpp"
#include "neutomo/topology.hpp"

using namespace neutomo;

static void BM_RouteAllPairs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Topology t = assign_link_metrics(generate_topology(n, 4.0, 7),
                                   LinkMetricRegime::uniform_random(), 7);
  for (auto _ : state) {
    GroundTruthTable gt = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                          MetricSemantics::kAdditive);
    benchmark::DoNotOptimize(gt.metrics().data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(GroundTruthTable::pair_count(n)));
}
BENCHMARK(BM_RouteAllPairs)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_RouteMinimax(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Topology t = assign_link_metrics(generate_topology(n, 4.0, 7),
                                   LinkMetricRegime::uniform_random(), 7);
  for (auto _ : state) {
    GroundTruthTable gt = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                          MetricSemantics::kCongestion);
    benchmark::DoNotOptimize(gt.metrics().data());
  }
}
BENCHMARK(BM_RouteMinimax)->Arg(100)->Unit(benchmark::kMillisecond);
