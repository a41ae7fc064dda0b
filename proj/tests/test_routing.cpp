#include "neutomo/routing.hpp"

#include <doctest.h>

#include <filesystem>
#include <vector>

#include "neutomo/error.hpp"
#include "oracles.hpp"

using namespace neutomo;
namespace nt = neutomo::testing;

namespace {

Topology path_graph_abc() {
  // A-B weight 2, B-C weight 3
  return Topology::make(3, {{0, 1}, {1, 2}}, {2.0, 3.0});
}

Topology triangle_572() {
  // A-B 5, B-C 2, A-C 7
  return Topology::make(3, {{0, 1}, {1, 2}, {0, 2}}, {5.0, 2.0, 7.0});
}

}  // namespace

TEST_CASE("path_metric combines additively or by the worst link") {
  std::vector<double> links{2.0, 3.0};
  CHECK(path_metric(links, MetricSemantics::kAdditive) == 5.0);
  CHECK(path_metric(links, MetricSemantics::kCongestion) == 3.0);
  std::vector<double> single{4.5};
  CHECK(path_metric(single, MetricSemantics::kAdditive) == 4.5);
  CHECK(path_metric(single, MetricSemantics::kCongestion) == 4.5);
  CHECK_THROWS_AS(path_metric({}, MetricSemantics::kAdditive), Error);
}

TEST_CASE("single path graphs route by summation") {
  GroundTruthTable gt = route_all_pairs(
      path_graph_abc(), RoutingStrategy::kBestPerformance, MetricSemantics::kAdditive);
  CHECK(gt.metric(0, 2) == 5.0);
  CHECK(gt.hops(0, 2) == 2);
}

TEST_CASE("congestion BPR bypasses the worst direct link") {
  GroundTruthTable gt = route_all_pairs(triangle_572(),
                                        RoutingStrategy::kBestPerformance,
                                        MetricSemantics::kCongestion);
  // Direct A-C has congestion 7; A-B-C has max(5, 2) = 5.
  CHECK(gt.metric(0, 2) == 5.0);
  CHECK(gt.hops(0, 2) == 2);
}

TEST_CASE("min-hop routing takes the direct edge regardless of its metric") {
  GroundTruthTable gt = route_all_pairs(triangle_572(), RoutingStrategy::kMinHop,
                                        MetricSemantics::kCongestion);
  CHECK(gt.hops(0, 2) == 1);
  CHECK(gt.metric(0, 2) == 7.0);
}

TEST_CASE("routing matches exhaustive enumeration on random small graphs") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 4 + static_cast<int>(seed % 5);
    const bool unit = seed % 3 == 0;
    Topology t = nt::random_small_topology(n, seed * 977 + 13, unit);
    if (!t.is_connected()) continue;
    for (RoutingStrategy strategy :
         {RoutingStrategy::kMinHop, RoutingStrategy::kBestPerformance}) {
      for (MetricSemantics semantics :
           {MetricSemantics::kAdditive, MetricSemantics::kCongestion}) {
        GroundTruthTable gt = route_all_pairs(t, strategy, semantics);
        for (int u = 0; u < n; ++u) {
          for (int v = u + 1; v < n; ++v) {
            auto expected = nt::oracle_route(t, u, v, strategy, semantics);
            REQUIRE(expected.has_value());
            CHECK(gt.hops(u, v) == expected->hops);
            CHECK(gt.metric(u, v) == expected->metric);
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("BPR never reports a worse metric than MHR") {
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    Topology t = nt::random_small_topology(8, seed);
    if (!t.is_connected()) continue;
    for (MetricSemantics semantics :
         {MetricSemantics::kAdditive, MetricSemantics::kCongestion}) {
      GroundTruthTable bpr =
          route_all_pairs(t, RoutingStrategy::kBestPerformance, semantics);
      GroundTruthTable mhr = route_all_pairs(t, RoutingStrategy::kMinHop, semantics);
      for (int u = 0; u < 8; ++u)
        for (int v = u + 1; v < 8; ++v)
          CHECK(bpr.metric(u, v) <= mhr.metric(u, v));
    }
  }
}

TEST_CASE("MHR hop counts satisfy the triangle inequality") {
  Topology t = nt::random_small_topology(8, 4242);
  REQUIRE(t.is_connected());
  GroundTruthTable gt =
      route_all_pairs(t, RoutingStrategy::kMinHop, MetricSemantics::kAdditive);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      for (int c = 0; c < 8; ++c) {
        if (a == b || b == c || a == c) continue;
        CHECK(gt.hops(a, c) <= gt.hops(a, b) + gt.hops(b, c));
      }
}

TEST_CASE("unweighted additive metrics equal hop counts for both strategies") {
  Topology t = nt::random_small_topology(8, 777, /*unit_metrics=*/true);
  REQUIRE(t.is_connected());
  GroundTruthTable bpr = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                         MetricSemantics::kAdditive);
  GroundTruthTable mhr =
      route_all_pairs(t, RoutingStrategy::kMinHop, MetricSemantics::kAdditive);
  for (int u = 0; u < 8; ++u)
    for (int v = u + 1; v < 8; ++v) {
      CHECK(bpr.metric(u, v) == static_cast<double>(bpr.hops(u, v)));
      CHECK(bpr.metric(u, v) == mhr.metric(u, v));
    }
}

TEST_CASE("disconnected topologies are rejected with unreachable pairs") {
  Topology t = Topology::make(4, {{0, 1}, {2, 3}}, {1.0, 1.0});
  CHECK_THROWS_WITH_AS(
      route_all_pairs(t, RoutingStrategy::kMinHop, MetricSemantics::kAdditive),
      doctest::Contains("unreachable pairs"), Error);
}

TEST_CASE("ground truth CSV round-trips") {
  Topology t = nt::random_small_topology(7, 31337);
  REQUIRE(t.is_connected());
  GroundTruthTable gt = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                        MetricSemantics::kAdditive);
  auto path = std::filesystem::temp_directory_path() / "gt_roundtrip.csv";
  gt.save_csv(path);
  GroundTruthTable loaded = GroundTruthTable::load_csv(path);
  REQUIRE(loaded.node_count() == gt.node_count());
  CHECK(loaded.metrics() == gt.metrics());
  CHECK(loaded.hop_counts() == gt.hop_counts());
}

TEST_CASE("pair indexing is a bijection") {
  GroundTruthTable gt(9);
  for (std::size_t idx = 0; idx < gt.size(); ++idx) {
    auto [u, v] = gt.pair_at(idx);
    CHECK(u < v);
    CHECK(gt.pair_index(u, v) == idx);
    CHECK(gt.pair_index(v, u) == idx);
  }
  CHECK_THROWS_AS(gt.pair_index(3, 3), Error);
}
