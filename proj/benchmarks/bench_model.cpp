#include <benchmark/benchmark.h>

#include <vector>

#include "neutomo/model.hpp"
#include "neutomo/rng.hpp"

using namespace neutomo;

namespace {

std::vector<TrainingExample> random_examples(int n, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainingExample> examples;
  examples.reserve(count);
  while (static_cast<int>(examples.size()) < count) {
    int u = static_cast<int>(rng.below(n));
    int v = static_cast<int>(rng.below(n));
    if (u == v) continue;
    examples.push_back({u, v, rng.uniform(1.0, 40.0)});
  }
  return examples;
}

}  // namespace

static void BM_TrainEpoch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ModelConfig config = ModelConfig::defaults(n);
  config.seed = 3;
  TomographyModel model = init_model(config);
  std::vector<TrainingExample> examples =
      random_examples(n, static_cast<int>(0.3 * n * (n - 1) / 2), 5);
  Rng shuffle_rng(11);
  for (auto _ : state) {
    train_epochs(model, examples, 1, config.learning_rate, config.batch_size,
                 shuffle_rng, nullptr);
  }
  state.SetItemsProcessed(state.iterations() * examples.size());
}
BENCHMARK(BM_TrainEpoch)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Predict(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ModelConfig config = ModelConfig::defaults(n);
  TomographyModel model = init_model(config);
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  for (auto _ : state) {
    PredictionTable table = predict(model, pairs);
    benchmark::DoNotOptimize(table.rows().data());
  }
  state.SetItemsProcessed(state.iterations() * pairs.size());
}
BENCHMARK(BM_Predict)->Arg(100)->Unit(benchmark::kMillisecond);
