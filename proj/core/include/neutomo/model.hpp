#ifndef NEUTOMO_MODEL_HPP_
#define NEUTOMO_MODEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "neutomo/prediction.hpp"

namespace neutomo {

class Rng;

struct ModelConfig {
  int node_count = 0;
  int hidden_width = 0;  // gamma; 0 resolves to ceil(2.5 * n)
  int hidden_layers = 2; // k
  int epochs = 1000;
  double learning_rate = 1.5e-3;
  int batch_size = 64;   // 0 means full batch
  std::uint64_t seed = 0;
  bool normalize_targets = true;  // divide targets by their max during training

  static ModelConfig defaults(int n) {
    ModelConfig c;
    c.node_count = n;
    return c;
  }
  static int default_width(int n);
  int resolved_width() const {
    return hidden_width > 0 ? hidden_width : default_width(node_count);
  }
  void validate() const;
};

struct TrainingExample {
  int u = 0;
  int v = 0;
  double target = 0.0;
};

/// One tensor per trainable parameter group; also the shape of gradients and
/// Adam moment accumulators.
struct ParameterSet {
  Eigen::MatrixXd input_weights;               // gamma x n (stored transposed)
  Eigen::VectorXd input_bias;                  // gamma
  std::vector<Eigen::MatrixXd> hidden_weights; // k-1 matrices, gamma x gamma
  std::vector<Eigen::VectorXd> hidden_biases;  // k-1 vectors
  Eigen::VectorXd output_weights;              // gamma; output has no bias

  static ParameterSet zeros_like(const ParameterSet& shape);
};

struct AdamState {
  ParameterSet first;
  ParameterSet second;
  std::uint64_t step = 0;
};

/// The pair-to-metric network: k sigmoid hidden layers of width gamma and a
/// single linear output neuron without bias or activation.
struct TomographyModel {
  int node_count = 0;
  int hidden_width = 0;
  int hidden_layers = 0;
  double target_scale = 1.0;  // predictions are multiplied back by this
  ParameterSet params;
  AdamState adam;
};

/// Fresh model with seeded uniform Xavier weights and zero biases.
TomographyModel init_model(const ModelConfig& config);

/// Two-hot encoding of an unordered pair.
Eigen::VectorXd encode_pair(int i, int j, int n);

/// Network output for an arbitrary input vector of length n. Hidden
/// activations are sigmoid, hence always in (0, 1).
double forward(const TomographyModel& model, const Eigen::VectorXd& input);

double loss_mse(std::span<const double> predicted,
                std::span<const double> targets);

/// Analytic gradients of the batch MSE with respect to every parameter.
ParameterSet backward(const TomographyModel& model,
                      std::span<const TrainingExample> batch);

/// One Adam update (beta1 = 0.9, beta2 = 0.999, eps = 1e-8) with bias
/// correction; advances the model's step counter.
void adam_step(TomographyModel& model, const ParameterSet& gradients,
               double learning_rate);

/// Runs `epochs` full passes of shuffled mini-batches over `examples`,
/// updating the model in place and appending the mean training MSE of each
/// epoch to `epoch_losses`. Throws on divergence, reporting the epoch.
void train_epochs(TomographyModel& model,
                  std::span<const TrainingExample> examples, int epochs,
                  double learning_rate, int batch_size, Rng& shuffle_rng,
                  std::vector<double>* epoch_losses);

struct TrainResult {
  TomographyModel model;
  std::vector<double> epoch_losses;
};

/// init_model + train_epochs with seed streams derived from config.seed.
TrainResult train(const ModelConfig& config,
                  std::span<const TrainingExample> examples);

double predict_value(const TomographyModel& model, int u, int v);

PredictionTable predict(const TomographyModel& model,
                        std::span<const std::pair<int, int>> pairs);

/// Versioned binary checkpoint; round-trips parameters and Adam state
/// exactly.
void save_model(const TomographyModel& model, const std::filesystem::path& path);
TomographyModel load_model(const std::filesystem::path& path);

}  // namespace neutomo

#endif  // NEUTOMO_MODEL_HPP_
