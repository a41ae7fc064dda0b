#include "neutomo/pat.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "neutomo/error.hpp"
#include "neutomo/sampling.hpp"
#include "oracles.hpp"

using namespace neutomo;
namespace nt = neutomo::testing;

namespace {

MeasurementSet tiny_set(int n, std::vector<MeasuredPair> measured) {
  GroundTruthTable index(n);
  std::vector<char> taken(index.size(), 0);
  for (const MeasuredPair& p : measured)
    taken[index.pair_index(p.u, p.v)] = 1;
  std::vector<MeasuredPair> heldout;
  for (std::size_t idx = 0; idx < index.size(); ++idx) {
    if (taken[idx]) continue;
    auto [u, v] = index.pair_at(idx);
    heldout.push_back({u, v, 0.0});
  }
  return MeasurementSet(n, SamplingMethod::kRandom, 0.0, std::move(measured),
                        std::move(heldout), {});
}

}  // namespace

TEST_CASE("the measurement graph mirrors the measured pairs") {
  MeasurementSet ms = tiny_set(3, {{0, 1, 2.0}, {1, 2, 3.0}});
  Topology g = build_measurement_graph(ms);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.metric(0) == 2.0);
  CHECK(g.metric(1) == 3.0);
  CHECK(g.is_connected());
}

TEST_CASE("a fully measured set yields the complete graph") {
  MeasurementSet ms =
      tiny_set(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0},
                   {1, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}});
  Topology g = build_measurement_graph(ms);
  CHECK(g.edge_count() == 6);
}

TEST_CASE("initial estimates follow best paths on the measurement graph") {
  MeasurementSet ms = tiny_set(3, {{0, 1, 2.0}, {1, 2, 3.0}});
  Topology g = build_measurement_graph(ms);
  std::vector<std::pair<int, int>> pairs{{0, 2}};

  EstimateTable additive = initial_estimates(g, MetricSemantics::kAdditive, pairs);
  REQUIRE(additive.size() == 1);
  CHECK(additive.rows()[0].value == 5.0);
  CHECK(additive.rows()[0].reachable);

  EstimateTable congestion =
      initial_estimates(g, MetricSemantics::kCongestion, pairs);
  CHECK(congestion.rows()[0].value == 3.0);
}

TEST_CASE("pairs across components come back unreachable") {
  MeasurementSet ms = tiny_set(4, {{0, 1, 2.0}, {2, 3, 3.0}});
  Topology g = build_measurement_graph(ms);
  std::vector<std::pair<int, int>> pairs{{0, 2}, {1, 3}, {0, 1}};
  EstimateTable est = initial_estimates(g, MetricSemantics::kAdditive, pairs);
  CHECK_FALSE(est.rows()[0].reachable);
  CHECK_FALSE(est.rows()[1].reachable);
  CHECK(est.rows()[2].reachable);
  CHECK(est.rows()[2].value == 2.0);
}

TEST_CASE("initial estimates equal brute force on random measurement graphs") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 4 + static_cast<int>(seed % 5);
    Topology t = nt::random_small_topology(n, seed * 131 + 7);
    if (!t.is_connected()) continue;
    GroundTruthTable gt = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                          MetricSemantics::kAdditive);
    MeasurementSet ms = sample_random(gt, 0.5, seed);
    Topology g = build_measurement_graph(ms);
    std::vector<std::pair<int, int>> pairs;
    for (const MeasuredPair& p : ms.heldout()) pairs.emplace_back(p.u, p.v);

    for (MetricSemantics semantics :
         {MetricSemantics::kAdditive, MetricSemantics::kCongestion}) {
      EstimateTable est = initial_estimates(g, semantics, pairs);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto expected =
            nt::oracle_best_path_value(g, pairs[i].first, pairs[i].second, semantics);
        if (expected) {
          CHECK(est.rows()[i].reachable);
          CHECK(est.rows()[i].value == *expected);
        } else {
          CHECK_FALSE(est.rows()[i].reachable);
        }
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("the soft update is the stated convex combination") {
  CHECK(pat_update_value(5.0, 10.0, 0.6) == doctest::Approx(7.0));
  CHECK(pat_update_value(5.0, 10.0, 0.0) == 10.0);
  for (double beta : {0.0, 0.3, 0.9}) {
    const double updated = pat_update_value(4.0, 8.0, beta);
    CHECK(updated >= 4.0);
    CHECK(updated <= 8.0);
  }
}

TEST_CASE("pat_train draws the exact augmented count and honors iterations") {
  Topology t = nt::random_small_topology(8, 5150);
  REQUIRE(t.is_connected());
  GroundTruthTable gt = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                        MetricSemantics::kAdditive);
  MeasurementSet ms = sample_random(gt, 0.5, 3);

  ModelConfig mc;
  mc.node_count = 8;
  mc.hidden_width = 10;
  mc.epochs = 120;
  mc.seed = 9;
  PatConfig pc;
  pc.alpha = 0.3;
  pc.beta = 0.6;
  pc.iterations = 4;
  pc.seed = 5;

  PatResult result = pat_train(ms, pc, mc, MetricSemantics::kAdditive);
  const std::size_t expected =
      static_cast<std::size_t>(std::floor(0.3 * ms.heldout().size()));
  REQUIRE(result.augmented_counts.size() == 4);
  for (std::size_t c : result.augmented_counts) CHECK(c == expected);
  CHECK(result.estimates.size() == ms.heldout().size());
  for (const Estimate& e : result.estimates.rows())
    CHECK(std::isfinite(e.value));
}

TEST_CASE("alpha small enough yields zero augmented pairs") {
  Topology t = nt::random_small_topology(6, 99);
  REQUIRE(t.is_connected());
  GroundTruthTable gt = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                        MetricSemantics::kAdditive);
  MeasurementSet ms = sample_random(gt, 0.8, 3);
  REQUIRE(!ms.heldout().empty());

  ModelConfig mc;
  mc.node_count = 6;
  mc.hidden_width = 8;
  mc.epochs = 60;
  PatConfig pc;
  pc.alpha = 0.1 / static_cast<double>(ms.heldout().size());  // < 1 pair
  pc.iterations = 2;
  PatResult result = pat_train(ms, pc, mc, MetricSemantics::kAdditive);
  for (std::size_t c : result.augmented_counts) CHECK(c == 0);
}

TEST_CASE("beta zero makes estimates track the model predictions") {
  Topology t = nt::random_small_topology(6, 17);
  REQUIRE(t.is_connected());
  GroundTruthTable gt = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                        MetricSemantics::kAdditive);
  MeasurementSet ms = sample_random(gt, 0.6, 2);

  ModelConfig mc;
  mc.node_count = 6;
  mc.hidden_width = 8;
  mc.epochs = 60;
  mc.seed = 21;
  PatConfig pc;
  pc.alpha = 0.4;
  pc.beta = 0.0;
  pc.iterations = 1;
  pc.seed = 2;
  PatResult result = pat_train(ms, pc, mc, MetricSemantics::kAdditive);

  std::vector<std::pair<int, int>> pairs;
  for (const MeasuredPair& p : ms.heldout()) pairs.emplace_back(p.u, p.v);
  PredictionTable direct = predict(result.model, pairs);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    CHECK(result.estimates.rows()[i].value == direct.rows()[i].value);
}

TEST_CASE("each update stays between the old estimate and the prediction") {
  Topology t = nt::random_small_topology(7, 23);
  REQUIRE(t.is_connected());
  GroundTruthTable gt = route_all_pairs(t, RoutingStrategy::kBestPerformance,
                                        MetricSemantics::kAdditive);
  MeasurementSet ms = sample_random(gt, 0.5, 4);
  Topology g = build_measurement_graph(ms);
  std::vector<std::pair<int, int>> pairs;
  for (const MeasuredPair& p : ms.heldout()) pairs.emplace_back(p.u, p.v);
  EstimateTable before = initial_estimates(g, MetricSemantics::kAdditive, pairs);

  ModelConfig mc;
  mc.node_count = 7;
  mc.hidden_width = 8;
  mc.epochs = 60;
  mc.seed = 31;
  PatConfig pc;
  pc.alpha = 0.2;
  pc.beta = 0.6;
  pc.iterations = 1;
  pc.seed = 6;
  PatResult result = pat_train(ms, pc, mc, MetricSemantics::kAdditive);

  PredictionTable after = predict(result.model, pairs);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!before.rows()[i].reachable) continue;
    const double lo = std::min(before.rows()[i].value, after.rows()[i].value);
    const double hi = std::max(before.rows()[i].value, after.rows()[i].value);
    CHECK(result.estimates.rows()[i].value >= lo - 1e-12);
    CHECK(result.estimates.rows()[i].value <= hi + 1e-12);
  }
}

TEST_CASE("estimates serialize with provenance") {
  EstimateTable est(std::vector<Estimate>{{0, 1, 2.5, true}, {0, 2, 3.5, false}});
  PredictionTable table = est.to_predictions();
  CHECK(table.rows()[0].provenance == Provenance::kPat);
  CHECK(table.rows()[1].provenance == Provenance::kModel);
  auto path = std::filesystem::temp_directory_path() / "estimates.csv";
  table.save_csv(path, /*with_provenance=*/true);
  PredictionTable loaded = PredictionTable::load_csv(path);
  CHECK(loaded.rows()[0].provenance == Provenance::kPat);
  CHECK(loaded.rows()[1].provenance == Provenance::kModel);
}

TEST_CASE("pat configs are validated") {
  PatConfig pc;
  pc.alpha = 0.0;
  CHECK_THROWS_AS(pc.validate(), Error);
  pc.alpha = 0.15;
  pc.beta = 1.0;
  CHECK_THROWS_AS(pc.validate(), Error);
  pc.beta = 0.6;
  pc.iterations = 0;
  CHECK_THROWS_AS(pc.validate(), Error);
}
