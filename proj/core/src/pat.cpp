#include "neutomo/pat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "neutomo/error.hpp"
#include "neutomo/rng.hpp"
#include "neutomo/routing.hpp"

namespace neutomo {

void PatConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error("beta must lie in [0, 1)");
  if (iterations < 1) throw Error("iteration count must be >= 1");
}

PredictionTable EstimateTable::to_predictions() const {
  PredictionTable table;
  for (const Estimate& e : rows_)
    table.add(e.u, e.v, e.value,
              e.reachable ? Provenance::kPat : Provenance::kModel);
  return table;
}

Topology build_measurement_graph(const MeasurementSet& ms) {
  std::vector<Edge> edges;
  std::vector<double> weights;
  edges.reserve(ms.measured().size());
  for (const MeasuredPair& p : ms.measured()) {
    edges.push_back({std::min(p.u, p.v), std::max(p.u, p.v)});
    weights.push_back(p.metric);
  }
  return Topology::make(ms.node_count(), std::move(edges), std::move(weights));
}

EstimateTable initial_estimates(const Topology& g_prime,
                                MetricSemantics semantics,
                                std::span<const std::pair<int, int>> pairs) {
  // Group by source so each node needs at most one single-source run.
  std::map<int, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    by_source[std::min(pairs[i].first, pairs[i].second)].push_back(i);

  std::vector<Estimate> rows(pairs.size());
  for (const auto& [source, indices] : by_source) {
    std::vector<double> costs = best_path_costs(g_prime, source, semantics);
    for (std::size_t i : indices) {
      auto [u, v] = pairs[i];
      int other = std::max(u, v);
      double c = costs[other];
      rows[i] = {u, v, std::isinf(c) ? 0.0 : c, !std::isinf(c)};
    }
  }
  return EstimateTable(std::move(rows));
}

PatResult pat_train(const MeasurementSet& ms, const PatConfig& config,
                    const ModelConfig& model_config,
                    MetricSemantics semantics) {
  config.validate();
  model_config.validate();

  Topology g_prime = build_measurement_graph(ms);
  std::vector<std::pair<int, int>> unmeasured;
  unmeasured.reserve(ms.heldout().size());
  for (const MeasuredPair& p : ms.heldout()) unmeasured.emplace_back(p.u, p.v);

  PatResult result;
  result.estimates = initial_estimates(g_prime, semantics, unmeasured);
  result.model = init_model(model_config);

  std::vector<std::size_t> reachable;
  for (std::size_t i = 0; i < result.estimates.size(); ++i)
    if (result.estimates.rows()[i].reachable) reachable.push_back(i);

  const std::size_t augment_count = static_cast<std::size_t>(
      std::floor(config.alpha * static_cast<double>(unmeasured.size())));
  if (augment_count > reachable.size())
    throw Error("not enough reachable pairs to draw the augmented set");

  double scale = 1.0;
  if (model_config.normalize_targets) {
    for (const MeasuredPair& p : ms.measured())
      scale = std::max(scale, p.metric);
    result.model.target_scale = scale;
  }

  const int epochs_per_iteration =
      std::max(50, model_config.epochs / config.iterations);

  Rng augment_rng(derive_seed(config.seed, "pat-augment"));
  Rng shuffle_rng(derive_seed(model_config.seed, "model-batch"));

  std::vector<TrainingExample> training;
  training.reserve(ms.measured().size() + augment_count);

  for (int iteration = 0; iteration < config.iterations; ++iteration) {
    if (config.reset_model_each_iteration && iteration > 0) {
      double kept_scale = result.model.target_scale;
      result.model = init_model(model_config);
      result.model.target_scale = kept_scale;
    }

    // Fresh uniform draw of augmented pairs each iteration.
    training.clear();
    for (const MeasuredPair& p : ms.measured())
      training.push_back({p.u, p.v, p.metric / scale});
    std::vector<std::size_t> drawn =
        augment_rng.sample_indices(reachable.size(), augment_count);
    for (std::size_t d : drawn) {
      const Estimate& e = result.estimates.rows()[reachable[d]];
      training.push_back({e.u, e.v, e.value / scale});
    }
    result.augmented_counts.push_back(drawn.size());

    train_epochs(result.model, training, epochs_per_iteration,
                 model_config.learning_rate, model_config.batch_size,
                 shuffle_rng, &result.epoch_losses);

    PredictionTable predicted = predict(result.model, unmeasured);
    for (std::size_t i = 0; i < result.estimates.size(); ++i) {
      Estimate& e = result.estimates.rows()[i];
      const double nt = predicted.rows()[i].value;
      // beta acts as zero for pairs outside the measurement graph's component.
      e.value = e.reachable ? pat_update_value(e.value, nt, config.beta) : nt;
    }
  }
  return result;
}

}  // namespace neutomo
