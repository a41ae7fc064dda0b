#ifndef NEUTOMO_EXPERIMENT_HPP_
#define NEUTOMO_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "neutomo/metrics.hpp"
#include "neutomo/model.hpp"
#include "neutomo/nmf.hpp"
#include "neutomo/pat.hpp"
#include "neutomo/routing.hpp"
#include "neutomo/sampling.hpp"
#include "neutomo/topology.hpp"

namespace neutomo {

enum class Method { kNeuTomo, kNeuTomoPat, kNmf };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct NetworkSource {
  std::string name = "synthetic";
  std::string file;  // edge-list path; empty means generate
  int nodes = 100;
  double avg_degree = 4.0;
};

/// Everything that determines a cell's outcome apart from the seed.
struct ExperimentSpec {
  NetworkSource network;
  LinkMetricRegime regime = LinkMetricRegime::uniform_random();
  MetricSemantics semantics = MetricSemantics::kAdditive;
  RoutingStrategy strategy = RoutingStrategy::kBestPerformance;
  SamplingMethod sampling = SamplingMethod::kRandom;
  double ratio = 0.3;
  Method method = Method::kNeuTomo;

  double gamma_factor = 2.5;  // hidden width = ceil(gamma_factor * n)
  int hidden_width = 0;       // explicit override; 0 uses gamma_factor
  int hidden_layers = 2;
  int epochs = 1000;
  double learning_rate = 1.5e-3;
  int batch_size = 64;
  bool normalize_targets = true;

  PatConfig pat;
  NmfConfig nmf;

  std::filesystem::path out_dir = "neutomo-out";
  bool force = false;  // recompute even when the cell is cached

  ModelConfig model_config(int node_count, std::uint64_t model_seed) const;

  /// Canonical JSON of the resolved configuration plus the master seed;
  /// hashing it yields the content address of the cell directory.
  std::string cell_json(std::uint64_t seed) const;
};

struct ReconstructionRow {
  int m = 0;
  long long tau = 0;
  std::optional<double> fpr;
  std::optional<double> fnr;
};

struct CellResult {
  EvalReport report;
  std::vector<ReconstructionRow> reconstruction;  // hop-count task only
  std::filesystem::path cell_dir;
  bool cached = false;
};

/// Runs one experiment cell end to end (topology -> metrics -> routing ->
/// sampling -> inference -> evaluation -> artifacts) under a content-addressed
/// directory. A completed cell is returned from cache unless spec.force is
/// set; seeded stages draw from independent streams derived from the master
/// seed. On failure a machine-readable error.json is written and the error is
/// rethrown.
CellResult run_cell(const ExperimentSpec& spec, std::uint64_t seed);

struct GridSpec {
  ExperimentSpec base;
  std::vector<NetworkSource> networks;    // empty: just base.network
  std::vector<LinkMetricRegime> regimes;  // empty: just base.regime
  std::vector<RoutingStrategy> strategies;
  std::vector<SamplingMethod> samplings;
  std::vector<double> ratios;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds = {1};
  int workers = 1;

  static GridSpec from_json_file(const std::filesystem::path& path);
  static GridSpec from_json_string(const std::string& text);
};

struct GridResult {
  std::filesystem::path rows_csv;
  std::filesystem::path summary_csv;
  int completed = 0;
  int failed = 0;
};

/// Runs the cross product of the grid dimensions and seeds, cell-parallel up
/// to `workers`. Emits one CSV row per (cell, seed) and a median-over-seeds
/// summary shaped rows = ratio x sampling, columns = strategy x regime.
/// Failed cells are recorded and leave gaps marked "na" in the summary.
GridResult run_grid(const GridSpec& spec);

}  // namespace neutomo

#endif  // NEUTOMO_EXPERIMENT_HPP_
