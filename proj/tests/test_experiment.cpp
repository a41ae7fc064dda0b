#include "neutomo/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "neutomo/error.hpp"

using namespace neutomo;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// A desk-scale cell that trains in well under a second.
ExperimentSpec small_spec(const std::filesystem::path& out) {
  ExperimentSpec spec;
  spec.network.name = "syn12";
  spec.network.nodes = 12;
  spec.network.avg_degree = 3.0;
  spec.regime = LinkMetricRegime::uniform_random(1.0, 10.0);
  spec.semantics = MetricSemantics::kAdditive;
  spec.strategy = RoutingStrategy::kBestPerformance;
  spec.sampling = SamplingMethod::kRandom;
  spec.ratio = 0.5;
  spec.method = Method::kNeuTomo;
  spec.epochs = 150;
  spec.out_dir = out;
  return spec;
}

}  // namespace

TEST_CASE("a fully measured triangle cell memorizes its training pairs") {
  auto out = fresh_dir("neutomo_cell_triangle");
  ExperimentSpec spec;
  spec.network.name = "triangle";
  spec.network.nodes = 3;
  spec.network.avg_degree = 2.0;
  spec.regime = LinkMetricRegime::uniform_random(1.0, 10.0);
  spec.ratio = 0.999;  // rounds to all pairs measured
  spec.batch_size = 1;
  spec.out_dir = out;
  CellResult cell = run_cell(spec, 1);
  CHECK(cell.report.mape < 5.0);
  CHECK(std::filesystem::exists(cell.cell_dir / "report.json"));
  CHECK(std::filesystem::exists(cell.cell_dir / "predictions.csv"));
  CHECK(std::filesystem::exists(cell.cell_dir / "loss.csv"));
}

TEST_CASE("the nmf method tags its report") {
  auto out = fresh_dir("neutomo_cell_nmf");
  ExperimentSpec spec = small_spec(out);
  spec.method = Method::kNmf;
  spec.nmf.rank = 4;
  CellResult cell = run_cell(spec, 3);
  CHECK(cell.report.method == "nmf");
  CHECK(cell.report.mape > 0.0);
}

TEST_CASE("reruns hit the cache and forced reruns are byte-identical") {
  auto out = fresh_dir("neutomo_cell_rerun");
  ExperimentSpec spec = small_spec(out);

  CellResult first = run_cell(spec, 7);
  CHECK_FALSE(first.cached);
  const std::string report_bytes = slurp(first.cell_dir / "report.json");
  const std::string predictions_bytes = slurp(first.cell_dir / "predictions.csv");

  CellResult second = run_cell(spec, 7);
  CHECK(second.cached);
  CHECK(second.report.mape == first.report.mape);

  spec.force = true;
  CellResult third = run_cell(spec, 7);
  CHECK_FALSE(third.cached);
  CHECK(slurp(third.cell_dir / "report.json") == report_bytes);
  CHECK(slurp(third.cell_dir / "predictions.csv") == predictions_bytes);
}

TEST_CASE("different seeds land in different cell directories") {
  auto out = fresh_dir("neutomo_cell_seeds");
  ExperimentSpec spec = small_spec(out);
  CellResult a = run_cell(spec, 1);
  CellResult b = run_cell(spec, 2);
  CHECK(a.cell_dir != b.cell_dir);
}

TEST_CASE("hop-count cells reconstruct adjacency matrices") {
  auto out = fresh_dir("neutomo_cell_hops");
  ExperimentSpec spec = small_spec(out);
  spec.network.nodes = 14;
  spec.regime = LinkMetricRegime::unweighted();
  spec.semantics = MetricSemantics::kAdditive;
  CellResult cell = run_cell(spec, 5);
  REQUIRE(cell.reconstruction.size() == 5);
  CHECK(cell.reconstruction[0].m == 1);
  CHECK(cell.reconstruction[0].tau > 0);
  CHECK(std::filesystem::exists(cell.cell_dir / "reconstruction.csv"));
  CHECK(std::filesystem::exists(cell.cell_dir / "adjacency_m1.txt"));
}

TEST_CASE("failures leave a machine-readable record") {
  auto out = fresh_dir("neutomo_cell_fail");
  ExperimentSpec spec = small_spec(out);
  spec.network.file = (out / "missing.txt").string();
  CHECK_THROWS_AS(run_cell(spec, 1), Error);
  bool found = false;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(out))
    if (entry.path().filename() == "error.json") found = true;
  CHECK(found);
}

TEST_CASE("grids emit one row per cell-seed plus a summary") {
  auto out = fresh_dir("neutomo_grid");
  GridSpec grid;
  grid.base = small_spec(out);
  grid.base.epochs = 60;
  grid.ratios = {0.4, 0.5};
  grid.methods = {Method::kNeuTomo, Method::kNmf};
  grid.seeds = {1, 2, 3};
  GridResult result = run_grid(grid);
  CHECK(result.completed == 12);
  CHECK(result.failed == 0);

  std::ifstream rows(result.rows_csv);
  std::string line;
  int data_rows = 0;
  std::getline(rows, line);
  CHECK(line == EvalReport::csv_header() + ",status");
  while (std::getline(rows, line))
    if (!line.empty()) ++data_rows;
  CHECK(data_rows == 12);

  std::ifstream summary(result.summary_csv);
  int summary_rows = 0;
  std::getline(summary, line);
  CHECK(line == "network,method,ratio,sampling,bpr:UD");
  while (std::getline(summary, line))
    if (!line.empty()) ++summary_rows;
  CHECK(summary_rows == 4);  // 2 ratios x 1 sampling x 2 methods
}

TEST_CASE("grid configs parse from JSON") {
  GridSpec grid = GridSpec::from_json_string(R"({
    "networks": [{"name": "g", "nodes": 16, "avg_degree": 3.0}],
    "regimes": ["unweighted", {"kind": "uniform", "lo": 1, "hi": 10}],
    "semantics": "additive",
    "strategies": ["bpr", "mhr"],
    "samplings": ["random"],
    "ratios": [0.3],
    "methods": ["neutomo", "neutomo+pat", "nmf"],
    "seeds": [1, 2],
    "model": {"epochs": 42, "gamma_factor": 2.0},
    "pat": {"alpha": 0.2, "beta": 0.5, "iterations": 3},
    "nmf": {"rank": 8},
    "workers": 2
  })");
  CHECK(grid.networks.size() == 1);
  CHECK(grid.regimes.size() == 2);
  CHECK(grid.strategies.size() == 2);
  CHECK(grid.methods.size() == 3);
  CHECK(grid.base.epochs == 42);
  CHECK(grid.base.gamma_factor == 2.0);
  CHECK(grid.base.pat.iterations == 3);
  CHECK(grid.base.nmf.rank == 8);
  CHECK(grid.workers == 2);
}

TEST_CASE("empty grids are rejected") {
  GridSpec grid;
  grid.base = small_spec(fresh_dir("neutomo_grid_empty"));
  grid.seeds = {};
  CHECK_THROWS_AS(run_grid(grid), Error);
}

TEST_CASE("grid failures are recorded and the run continues") {
  auto out = fresh_dir("neutomo_grid_fail");
  GridSpec grid;
  grid.base = small_spec(out);
  grid.base.epochs = 40;
  NetworkSource good = grid.base.network;
  NetworkSource bad;
  bad.name = "missing";
  bad.file = (out / "nope.txt").string();
  grid.networks = {good, bad};
  grid.seeds = {1};
  GridResult result = run_grid(grid);
  CHECK(result.completed == 1);
  CHECK(result.failed == 1);

  std::ifstream rows(result.rows_csv);
  std::string line, all;
  while (std::getline(rows, line)) all += line + "\n";
  CHECK(all.find(",failed") != std::string::npos);

  std::ifstream summary(result.summary_csv);
  all.clear();
  while (std::getline(summary, line)) all += line + "\n";
  CHECK(all.find("na") != std::string::npos);
}

TEST_CASE("methods and regimes round-trip through their names") {
  CHECK(method_from_string("neutomo") == Method::kNeuTomo);
  CHECK(method_from_string("neutomo+pat") == Method::kNeuTomoPat);
  CHECK(method_from_string("nmf") == Method::kNmf);
  CHECK(to_string(Method::kNeuTomoPat) == "neutomo+pat");
  CHECK_THROWS_AS(method_from_string("anmi"), Error);
}
