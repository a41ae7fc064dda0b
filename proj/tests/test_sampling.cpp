#include "neutomo/sampling.hpp"

#include <doctest.h>

#include <set>
#include <vector>

#include "neutomo/error.hpp"
#include "oracles.hpp"

using namespace neutomo;
namespace nt = neutomo::testing;

namespace {

GroundTruthTable make_table(int n) {
  GroundTruthTable gt(n);
  for (std::size_t idx = 0; idx < gt.size(); ++idx) {
    auto [u, v] = gt.pair_at(idx);
    gt.set(u, v, 1, 1.0 + u + v);
  }
  return gt;
}

bool covers_all(const MeasurementSet& ms) {
  std::vector<int> cover(ms.node_count(), 0);
  for (const MeasuredPair& p : ms.measured()) {
    ++cover[p.u];
    ++cover[p.v];
  }
  for (int c : cover)
    if (c == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("random sampling returns the rounded pair count with coverage") {
  GroundTruthTable gt = make_table(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MeasurementSet ms = sample_random(gt, 0.3, seed);
    CHECK(ms.measured().size() == 3);
    CHECK(ms.heldout().size() == 7);
    CHECK(covers_all(ms));
  }
}

TEST_CASE("a ratio close to one measures nearly everything") {
  GroundTruthTable gt = make_table(5);
  MeasurementSet ms = sample_random(gt, 0.999, 1);
  CHECK(ms.measured().size() == 10);
  CHECK(ms.heldout().empty());
  CHECK(covers_all(ms));
}

TEST_CASE("random sampling is deterministic per seed") {
  GroundTruthTable gt = make_table(30);
  MeasurementSet a = sample_random(gt, 0.25, 99);
  MeasurementSet b = sample_random(gt, 0.25, 99);
  REQUIRE(a.measured().size() == b.measured().size());
  for (std::size_t i = 0; i < a.measured().size(); ++i) {
    CHECK(a.measured()[i].u == b.measured()[i].u);
    CHECK(a.measured()[i].v == b.measured()[i].v);
  }
}

TEST_CASE("measured and held-out partition the pair set") {
  GroundTruthTable gt = make_table(12);
  MeasurementSet ms = sample_random(gt, 0.4, 5);
  CHECK(ms.measured().size() + ms.heldout().size() == gt.size());
  std::set<std::pair<int, int>> seen;
  for (const MeasuredPair& p : ms.measured()) seen.insert({p.u, p.v});
  for (const MeasuredPair& p : ms.heldout()) {
    CHECK(!seen.contains({p.u, p.v}));
    seen.insert({p.u, p.v});
  }
  CHECK(seen.size() == gt.size());
}

TEST_CASE("ratio preconditions are enforced") {
  GroundTruthTable gt = make_table(10);
  CHECK_THROWS_AS(sample_random(gt, 0.0, 1), Error);
  CHECK_THROWS_AS(sample_random(gt, 1.0, 1), Error);
  // floor(0.08 * 45) = 3 pairs cannot cover 10 nodes.
  CHECK_THROWS_AS(sample_random(gt, 0.08, 1), Error);
}

TEST_CASE("monitor count formula picks the smallest sufficient rho") {
  CHECK(monitor_candidate_pairs(5, 2) == 7);
  CHECK(monitor_count_for_target(5, 3) == 1);     // 1*5 - 1 = 4 >= 3
  CHECK(monitor_count_for_target(100, 990) == 11);
  CHECK(monitor_candidate_pairs(100, 10) == 945); // one short of 990
}

TEST_CASE("monitor-based sampling keeps the size, coverage and monitor invariants") {
  GroundTruthTable gt = make_table(5);
  MeasurementSet ms = sample_monitor_based(gt, 0.3, 7);
  CHECK(ms.measured().size() == 3);
  CHECK(covers_all(ms));
  REQUIRE(!ms.monitors().empty());
  std::set<int> monitors(ms.monitors().begin(), ms.monitors().end());
  for (const MeasuredPair& p : ms.measured())
    CHECK((monitors.contains(p.u) || monitors.contains(p.v)));
}

TEST_CASE("monitor-based sampling at scale") {
  GroundTruthTable gt = make_table(60);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    for (double ratio : {0.2, 0.3}) {
      MeasurementSet ms = sample_monitor_based(gt, ratio, seed);
      const long long target = std::llround(ratio * static_cast<double>(gt.size()));
      CHECK(static_cast<long long>(ms.measured().size()) == target);
      CHECK(covers_all(ms));
      std::set<int> monitors(ms.monitors().begin(), ms.monitors().end());
      for (const MeasuredPair& p : ms.measured())
        CHECK((monitors.contains(p.u) || monitors.contains(p.v)));
      // Every measured metric is the ground-truth value for that pair.
      for (const MeasuredPair& p : ms.measured())
        CHECK(p.metric == gt.metric(p.u, p.v));
    }
  }
}

TEST_CASE("monitor-based sampling is deterministic per seed") {
  GroundTruthTable gt = make_table(40);
  MeasurementSet a = sample_monitor_based(gt, 0.25, 3);
  MeasurementSet b = sample_monitor_based(gt, 0.25, 3);
  CHECK(a.monitors() == b.monitors());
  REQUIRE(a.measured().size() == b.measured().size());
  for (std::size_t i = 0; i < a.measured().size(); ++i) {
    CHECK(a.measured()[i].u == b.measured()[i].u);
    CHECK(a.measured()[i].v == b.measured()[i].v);
  }
}

TEST_CASE("measurement sets round-trip through CSV") {
  GroundTruthTable gt = make_table(8);
  MeasurementSet ms = sample_random(gt, 0.4, 11);
  auto dir = std::filesystem::temp_directory_path() / "neutomo_ms";
  ms.save(dir);
  std::vector<MeasuredPair> measured = load_pairs_csv(dir / "measured.csv");
  REQUIRE(measured.size() == ms.measured().size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    CHECK(measured[i].u == ms.measured()[i].u);
    CHECK(measured[i].v == ms.measured()[i].v);
    CHECK(measured[i].metric == ms.measured()[i].metric);
  }
}
