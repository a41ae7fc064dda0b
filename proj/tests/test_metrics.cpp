#include "neutomo/metrics.hpp"

#include <doctest.h>

#include <vector>

#include "neutomo/error.hpp"
#include "neutomo/rng.hpp"

using namespace neutomo;

TEST_CASE("mape matches hand values") {
  std::vector<double> p1{2.0, 5.0}, t1{4.0, 5.0};
  CHECK(mape(p1, t1) == doctest::Approx(25.0));
  std::vector<double> p2{1.0, 2.0}, t2{1.0, 2.0};
  CHECK(mape(p2, t2) == 0.0);
  std::vector<double> p3{8.0}, t3{4.0};
  CHECK(mape(p3, t3) == doctest::Approx(100.0));
}

TEST_CASE("mape rejects empty input and zero truth") {
  CHECK_THROWS_AS(mape({}, {}), Error);
  std::vector<double> p{1.0}, t{0.0};
  CHECK_THROWS_AS(mape(p, t), Error);
}

TEST_CASE("mape is invariant under joint scaling") {
  Rng rng(5);
  std::vector<double> p, t;
  for (int i = 0; i < 50; ++i) {
    p.push_back(rng.uniform(1.0, 20.0));
    t.push_back(rng.uniform(1.0, 20.0));
  }
  const double base = mape(p, t);
  for (double& x : p) x *= 7.5;
  for (double& x : t) x *= 7.5;
  CHECK(mape(p, t) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("distribution distance on the reference shapes") {
  std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(distribution_distance(a, a) == 0.0);

  std::vector<double> left{1.0, 2.0}, right{10.0, 11.0};
  CHECK(distribution_distance(left, right) == doctest::Approx(2.0));

  // Equal masses on {1,2} vs {2,3}: overlap only on bin 2.
  std::vector<double> p{1.0, 2.0}, q{2.0, 3.0};
  CHECK(distribution_distance(p, q) == doctest::Approx(1.0));
}

TEST_CASE("distribution distance is symmetric and satisfies the triangle inequality") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b, c;
    for (int i = 0; i < 30; ++i) {
      a.push_back(rng.uniform(0.0, 8.0));
      b.push_back(rng.uniform(0.0, 8.0));
      c.push_back(rng.uniform(0.0, 8.0));
    }
    const double ab = distribution_distance(a, b);
    const double ba = distribution_distance(b, a);
    const double ac = distribution_distance(a, c);
    const double cb = distribution_distance(c, b);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= 2.0);
  }
}

TEST_CASE("unit histogram bins follow the (k-0.5, k+0.5] rule") {
  std::vector<double> samples{1.5, 1.50001, 0.2, -0.7};
  auto hist = unit_histogram(samples);
  CHECK(hist[1] == doctest::Approx(0.25));   // 1.5
  CHECK(hist[2] == doctest::Approx(0.25));   // 1.50001
  CHECK(hist[0] == doctest::Approx(0.25));   // 0.2
  CHECK(hist[-1] == doctest::Approx(0.25));  // -0.7
}

TEST_CASE("evaluate_predictions fills mape-consistent per-pair errors") {
  std::vector<double> pred{2.0, 5.0, 3.0}, truth{4.0, 5.0, 6.0};
  EvalReport report = evaluate_predictions(pred, truth);
  REQUIRE(report.per_pair_ape.size() == 3);
  double mean = 0.0;
  for (double ape : report.per_pair_ape) mean += ape;
  mean /= 3.0;
  CHECK(report.mape == doctest::Approx(mean));
  CHECK(report.histogram_l1 >= 0.0);
  CHECK(report.histogram_l1 <= 2.0);
}

TEST_CASE("csv rows carry the cell metadata") {
  EvalReport report;
  report.mape = 12.5;
  report.histogram_l1 = 0.25;
  report.network = "syn100";
  report.regime = "UD";
  report.strategy = "bpr";
  report.semantics = "additive";
  report.sampling = "random";
  report.ratio = 0.3;
  report.method = "neutomo";
  report.seed = 42;
  CHECK(EvalReport::csv_header() ==
        "network,regime,strategy,semantics,sampling,ratio,method,seed,mape,"
        "histogram_l1");
  CHECK(report.csv_row() == "syn100,UD,bpr,additive,random,0.3,neutomo,42,12.5,0.25");
}
