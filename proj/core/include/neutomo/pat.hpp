#ifndef NEUTOMO_PAT_HPP_
#define NEUTOMO_PAT_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "neutomo/model.hpp"
#include "neutomo/sampling.hpp"
#include "neutomo/topology.hpp"

namespace neutomo {

struct PatConfig {
  double alpha = 0.15;  // fraction of unmeasured pairs augmented per iteration
  double beta = 0.6;    // soft-update weight toward the previous estimate
  int iterations = 6;
  bool reset_model_each_iteration = false;  // default: warm-start across iterations
  std::uint64_t seed = 0;                   // augmentation draw stream

  void validate() const;
};

struct Estimate {
  int u = 0;
  int v = 0;
  double value = 0.0;
  bool reachable = true;  // connected to the pair's endpoints within G'
};

/// Current estimates for every unmeasured pair. Unreachable pairs (endpoints
/// in different components of the measurement graph) are never augmented and
/// track the raw model prediction instead of the soft update.
class EstimateTable {
 public:
  EstimateTable() = default;
  explicit EstimateTable(std::vector<Estimate> rows) : rows_(std::move(rows)) {}

  const std::vector<Estimate>& rows() const { return rows_; }
  std::vector<Estimate>& rows() { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Provenance "pat" for refined estimates, "model" for unreachable pairs.
  PredictionTable to_predictions() const;

 private:
  std::vector<Estimate> rows_;
};

/// Maps the measured pairs to a weighted graph G' = (V, S, {d_phi}).
Topology build_measurement_graph(const MeasurementSet& ms);

/// Best-path estimates on G' for the given pairs: least-sum paths under
/// additive semantics, minimax paths under congestion. Pairs that span
/// components come back unreachable.
EstimateTable initial_estimates(const Topology& g_prime,
                                MetricSemantics semantics,
                                std::span<const std::pair<int, int>> pairs);

/// The soft update applied to each reachable estimate after every iteration.
inline double pat_update_value(double current, double predicted, double beta) {
  return beta * current + (1.0 - beta) * predicted;
}

struct PatResult {
  TomographyModel model;
  EstimateTable estimates;
  std::vector<std::size_t> augmented_counts;  // per iteration
  std::vector<double> epoch_losses;           // concatenated across iterations
};

/// Path Augmented Tomography: seeds estimates from G', then alternates
/// between training on S plus freshly drawn augmented pairs and softly
/// updating every reachable estimate with the model's prediction.
PatResult pat_train(const MeasurementSet& ms, const PatConfig& config,
                    const ModelConfig& model_config, MetricSemantics semantics);

}  // namespace neutomo

#endif  // NEUTOMO_PAT_HPP_
