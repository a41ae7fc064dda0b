#include "neutomo/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "neutomo/error.hpp"
#include "neutomo/rng.hpp"

namespace neutomo {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void check_pair(int u, int v, int n) {
  if (u < 0 || v < 0 || u >= n || v >= n)
    throw Error("pair endpoint out of range");
  if (u == v) throw Error("pair endpoints must differ");
}

template <class Derived>
void sigmoid_inplace(Eigen::MatrixBase<Derived>& x) {
  x = (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

// Batched activations, column per example. Buffers are sized once and sliced
// with leftCols so the gemm shapes stay stable across partial batches.
struct Workspace {
  std::vector<Eigen::MatrixXd> acts;   // k buffers, gamma x max_batch
  std::vector<Eigen::MatrixXd> delta;  // k buffers, gamma x max_batch
  Eigen::VectorXd preds;               // max_batch
  Eigen::VectorXd targets;             // max_batch
  std::vector<int> us, vs;

  Workspace(int gamma, int layers, int max_batch)
      : preds(max_batch), targets(max_batch) {
    acts.assign(layers, Eigen::MatrixXd(gamma, max_batch));
    delta.assign(layers, Eigen::MatrixXd(gamma, max_batch));
    us.resize(max_batch);
    vs.resize(max_batch);
  }

  void load(std::span<const TrainingExample> batch) {
    for (std::size_t b = 0; b < batch.size(); ++b) {
      us[b] = batch[b].u;
      vs[b] = batch[b].v;
      targets[static_cast<Eigen::Index>(b)] = batch[b].target;
    }
  }
};

void forward_batch(const TomographyModel& model, int count, Workspace& ws) {
  const int k = model.hidden_layers;
  auto a0 = ws.acts[0].leftCols(count);
  for (int b = 0; b < count; ++b) {
    a0.col(b) = model.params.input_weights.col(ws.us[b]) +
                model.params.input_weights.col(ws.vs[b]) +
                model.params.input_bias;
  }
  sigmoid_inplace(a0);
  for (int j = 1; j < k; ++j) {
    auto aj = ws.acts[j].leftCols(count);
    aj.noalias() = model.params.hidden_weights[j - 1].transpose() *
                   ws.acts[j - 1].leftCols(count);
    aj.colwise() += model.params.hidden_biases[j - 1];
    sigmoid_inplace(aj);
  }
  ws.preds.head(count).noalias() =
      ws.acts[k - 1].leftCols(count).transpose() * model.params.output_weights;
}

// MSE gradients from the activations left in `ws` by forward_batch.
void backward_batch(const TomographyModel& model, int count, Workspace& ws,
                    ParameterSet& grads) {
  const int k = model.hidden_layers;
  const double inv = 2.0 / count;
  Eigen::VectorXd dpred =
      inv * (ws.preds.head(count) - ws.targets.head(count));

  grads.output_weights.noalias() = ws.acts[k - 1].leftCols(count) * dpred;

  auto dv = ws.delta[k - 1].leftCols(count);
  dv.noalias() = model.params.output_weights * dpred.transpose();
  for (int j = k - 1; j >= 1; --j) {
    auto act = ws.acts[j].leftCols(count);
    auto dz = ws.delta[j].leftCols(count);
    dz.array() *= act.array() * (1.0 - act.array());
    grads.hidden_weights[j - 1].noalias() =
        ws.acts[j - 1].leftCols(count) * dz.transpose();
    grads.hidden_biases[j - 1] = dz.rowwise().sum();
    ws.delta[j - 1].leftCols(count).noalias() =
        model.params.hidden_weights[j - 1] * dz;
  }
  auto act0 = ws.acts[0].leftCols(count);
  auto dz0 = ws.delta[0].leftCols(count);
  dz0.array() *= act0.array() * (1.0 - act0.array());
  grads.input_bias = dz0.rowwise().sum();
  grads.input_weights.setZero();
  for (int b = 0; b < count; ++b) {
    grads.input_weights.col(ws.us[b]) += dz0.col(b);
    grads.input_weights.col(ws.vs[b]) += dz0.col(b);
  }
}

template <class Tensor>
void adam_update(Tensor& param, const Tensor& grad, Tensor& first,
                 Tensor& second, double lr, double bias1, double bias2) {
  first.array() = kAdamBeta1 * first.array() + (1.0 - kAdamBeta1) * grad.array();
  second.array() =
      kAdamBeta2 * second.array() + (1.0 - kAdamBeta2) * grad.array().square();
  param.array() -= lr * (first.array() / bias1) /
                   ((second.array() / bias2).sqrt() + kAdamEps);
}

bool all_finite(const ParameterSet& p) {
  if (!p.input_weights.allFinite() || !p.input_bias.allFinite() ||
      !p.output_weights.allFinite())
    return false;
  for (const auto& w : p.hidden_weights)
    if (!w.allFinite()) return false;
  for (const auto& b : p.hidden_biases)
    if (!b.allFinite()) return false;
  return true;
}

}  // namespace

int ModelConfig::default_width(int n) {
  return static_cast<int>(std::ceil(2.5 * n));
}

void ModelConfig::validate() const {
  if (node_count < 2) throw Error("model needs at least two nodes");
  if (resolved_width() < 1) throw Error("hidden width must be >= 1");
  if (hidden_layers < 1) throw Error("hidden layer count must be >= 1");
  if (epochs < 1) throw Error("epoch count must be >= 1");
  if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (batch_size < 0) throw Error("batch size must be >= 0");
}

ParameterSet ParameterSet::zeros_like(const ParameterSet& shape) {
  ParameterSet z;
  z.input_weights = Eigen::MatrixXd::Zero(shape.input_weights.rows(),
                                          shape.input_weights.cols());
  z.input_bias = Eigen::VectorXd::Zero(shape.input_bias.size());
  for (const auto& w : shape.hidden_weights)
    z.hidden_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : shape.hidden_biases)
    z.hidden_biases.push_back(Eigen::VectorXd::Zero(b.size()));
  z.output_weights = Eigen::VectorXd::Zero(shape.output_weights.size());
  return z;
}

TomographyModel init_model(const ModelConfig& config) {
  config.validate();
  const int n = config.node_count;
  const int gamma = config.resolved_width();
  const int k = config.hidden_layers;

  TomographyModel model;
  model.node_count = n;
  model.hidden_width = gamma;
  model.hidden_layers = k;

  Rng rng(derive_seed(config.seed, "model-init"));
  auto fill_uniform = [&rng](Eigen::Ref<Eigen::MatrixXd> m, double limit) {
    double* data = m.data();
    for (Eigen::Index i = 0; i < m.size(); ++i)
      data[i] = rng.uniform(-limit, limit);
  };

  model.params.input_weights.resize(gamma, n);
  fill_uniform(model.params.input_weights, std::sqrt(6.0 / (n + gamma)));
  model.params.input_bias = Eigen::VectorXd::Zero(gamma);
  for (int j = 1; j < k; ++j) {
    Eigen::MatrixXd w(gamma, gamma);
    fill_uniform(w, std::sqrt(6.0 / (gamma + gamma)));
    model.params.hidden_weights.push_back(std::move(w));
    model.params.hidden_biases.push_back(Eigen::VectorXd::Zero(gamma));
  }
  model.params.output_weights.resize(gamma);
  fill_uniform(model.params.output_weights, std::sqrt(6.0 / (gamma + 1)));

  model.adam.first = ParameterSet::zeros_like(model.params);
  model.adam.second = ParameterSet::zeros_like(model.params);
  model.adam.step = 0;
  return model;
}

Eigen::VectorXd encode_pair(int i, int j, int n) {
  check_pair(i, j, n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[i] = 1.0;
  v[j] = 1.0;
  return v;
}

double forward(const TomographyModel& model, const Eigen::VectorXd& input) {
  if (input.size() != model.node_count)
    throw Error("input vector length does not match the model");
  Eigen::VectorXd v = model.params.input_weights * input + model.params.input_bias;
  sigmoid_inplace(v);
  for (std::size_t j = 0; j < model.params.hidden_weights.size(); ++j) {
    v = (model.params.hidden_weights[j].transpose() * v +
         model.params.hidden_biases[j])
            .eval();
    sigmoid_inplace(v);
  }
  return model.params.output_weights.dot(v);
}

double loss_mse(std::span<const double> predicted,
                std::span<const double> targets) {
  if (predicted.empty() || predicted.size() != targets.size())
    throw Error("loss needs equal-length, nonempty inputs");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double r = predicted[i] - targets[i];
    acc += r * r;
  }
  return acc / static_cast<double>(predicted.size());
}

ParameterSet backward(const TomographyModel& model,
                      std::span<const TrainingExample> batch) {
  if (batch.empty()) throw Error("backward needs a nonempty batch");
  for (const TrainingExample& e : batch) check_pair(e.u, e.v, model.node_count);

  Workspace ws(model.hidden_width, model.hidden_layers,
               static_cast<int>(batch.size()));
  ws.load(batch);
  forward_batch(model, static_cast<int>(batch.size()), ws);
  for (const auto& act : ws.acts)
    if (!act.allFinite())
      throw Error("non-finite activation; model parameters are diverging");
  ParameterSet grads = ParameterSet::zeros_like(model.params);
  backward_batch(model, static_cast<int>(batch.size()), ws, grads);
  return grads;
}

void adam_step(TomographyModel& model, const ParameterSet& gradients,
               double learning_rate) {
  if (!all_finite(gradients)) throw Error("non-finite gradient");
  AdamState& st = model.adam;
  st.step += 1;
  const double bias1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(st.step));
  const double bias2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(st.step));

  adam_update(model.params.input_weights, gradients.input_weights,
              st.first.input_weights, st.second.input_weights, learning_rate,
              bias1, bias2);
  adam_update(model.params.input_bias, gradients.input_bias,
              st.first.input_bias, st.second.input_bias, learning_rate, bias1,
              bias2);
  for (std::size_t j = 0; j < model.params.hidden_weights.size(); ++j) {
    adam_update(model.params.hidden_weights[j], gradients.hidden_weights[j],
                st.first.hidden_weights[j], st.second.hidden_weights[j],
                learning_rate, bias1, bias2);
    adam_update(model.params.hidden_biases[j], gradients.hidden_biases[j],
                st.first.hidden_biases[j], st.second.hidden_biases[j],
                learning_rate, bias1, bias2);
  }
  adam_update(model.params.output_weights, gradients.output_weights,
              st.first.output_weights, st.second.output_weights, learning_rate,
              bias1, bias2);
}

void train_epochs(TomographyModel& model,
                  std::span<const TrainingExample> examples, int epochs,
                  double learning_rate, int batch_size, Rng& shuffle_rng,
                  std::vector<double>* epoch_losses) {
  if (examples.empty()) throw Error("training set is empty");
  for (const TrainingExample& e : examples)
    check_pair(e.u, e.v, model.node_count);

  const int total = static_cast<int>(examples.size());
  const int bs = batch_size <= 0 ? total : std::min(batch_size, total);

  Workspace ws(model.hidden_width, model.hidden_layers, bs);
  ParameterSet grads = ParameterSet::zeros_like(model.params);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<TrainingExample> batch(bs);

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double squared_sum = 0.0;
    for (int start = 0; start < total; start += bs) {
      const int count = std::min(bs, total - start);
      for (int b = 0; b < count; ++b) batch[b] = examples[order[start + b]];
      ws.load(std::span<const TrainingExample>(batch.data(), count));
      forward_batch(model, count, ws);
      const double batch_sq =
          (ws.preds.head(count) - ws.targets.head(count)).squaredNorm();
      if (!std::isfinite(batch_sq))
        throw Error("training diverged at epoch " + std::to_string(epoch));
      squared_sum += batch_sq;
      backward_batch(model, count, ws, grads);
      adam_step(model, grads, learning_rate);
    }
    if (epoch_losses) epoch_losses->push_back(squared_sum / total);
  }
}

TrainResult train(const ModelConfig& config,
                  std::span<const TrainingExample> examples) {
  config.validate();
  if (examples.empty()) throw Error("training set is empty");

  TrainResult result;
  result.model = init_model(config);

  std::vector<TrainingExample> scaled(examples.begin(), examples.end());
  if (config.normalize_targets) {
    double max_target = 0.0;
    for (const TrainingExample& e : scaled)
      max_target = std::max(max_target, e.target);
    if (!(max_target > 0.0))
      throw Error("target normalization needs a positive maximum");
    for (TrainingExample& e : scaled) e.target /= max_target;
    result.model.target_scale = max_target;
  }

  Rng shuffle_rng(derive_seed(config.seed, "model-batch"));
  train_epochs(result.model, scaled, config.epochs, config.learning_rate,
               config.batch_size, shuffle_rng, &result.epoch_losses);
  return result;
}

double predict_value(const TomographyModel& model, int u, int v) {
  check_pair(u, v, model.node_count);
  Workspace ws(model.hidden_width, model.hidden_layers, 1);
  ws.us[0] = u;
  ws.vs[0] = v;
  ws.targets[0] = 0.0;
  forward_batch(model, 1, ws);
  return ws.preds[0] * model.target_scale;
}

PredictionTable predict(const TomographyModel& model,
                        std::span<const std::pair<int, int>> pairs) {
  PredictionTable table;
  if (pairs.empty()) return table;
  const int chunk = 512;
  Workspace ws(model.hidden_width, model.hidden_layers,
               static_cast<int>(std::min<std::size_t>(chunk, pairs.size())));
  for (std::size_t start = 0; start < pairs.size(); start += chunk) {
    const int count =
        static_cast<int>(std::min<std::size_t>(chunk, pairs.size() - start));
    for (int b = 0; b < count; ++b) {
      auto [u, v] = pairs[start + b];
      check_pair(u, v, model.node_count);
      ws.us[b] = u;
      ws.vs[b] = v;
    }
    forward_batch(model, count, ws);
    for (int b = 0; b < count; ++b) {
      auto [u, v] = pairs[start + b];
      table.add(u, v, ws.preds[b] * model.target_scale, Provenance::kModel);
    }
  }
  return table;
}

namespace {

constexpr char kMagic[8] = {'N', 'T', 'M', 'O', 'D', 'E', 'L', '1'};

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* data, std::size_t bytes) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (!in) throw Error("truncated model checkpoint");
}

void write_tensor(std::ofstream& out, const Eigen::MatrixXd& m) {
  write_raw(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

void write_tensor(std::ofstream& out, const Eigen::VectorXd& v) {
  write_raw(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

void read_tensor(std::ifstream& in, Eigen::MatrixXd& m) {
  read_raw(in, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

void read_tensor(std::ifstream& in, Eigen::VectorXd& v) {
  read_raw(in, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

void write_set(std::ofstream& out, const ParameterSet& p) {
  write_tensor(out, p.input_weights);
  write_tensor(out, p.input_bias);
  for (const auto& w : p.hidden_weights) write_tensor(out, w);
  for (const auto& b : p.hidden_biases) write_tensor(out, b);
  write_tensor(out, p.output_weights);
}

void read_set(std::ifstream& in, ParameterSet& p) {
  read_tensor(in, p.input_weights);
  read_tensor(in, p.input_bias);
  for (auto& w : p.hidden_weights) read_tensor(in, w);
  for (auto& b : p.hidden_biases) read_tensor(in, b);
  read_tensor(in, p.output_weights);
}

}  // namespace

void save_model(const TomographyModel& model,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model checkpoint: " + path.string());
  write_raw(out, kMagic, sizeof(kMagic));
  const std::int32_t dims[3] = {model.node_count, model.hidden_width,
                                model.hidden_layers};
  write_raw(out, dims, sizeof(dims));
  write_raw(out, &model.target_scale, sizeof(double));
  write_raw(out, &model.adam.step, sizeof(std::uint64_t));
  write_set(out, model.params);
  write_set(out, model.adam.first);
  write_set(out, model.adam.second);
  if (!out) throw Error("write failed: " + path.string());
}

TomographyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model checkpoint: " + path.string());
  char magic[8];
  read_raw(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw Error("not a neutomo model checkpoint: " + path.string());
  std::int32_t dims[3];
  read_raw(in, dims, sizeof(dims));
  if (dims[0] < 2 || dims[1] < 1 || dims[2] < 1)
    throw Error("corrupt model checkpoint: " + path.string());

  TomographyModel model;
  model.node_count = dims[0];
  model.hidden_width = dims[1];
  model.hidden_layers = dims[2];
  read_raw(in, &model.target_scale, sizeof(double));
  read_raw(in, &model.adam.step, sizeof(std::uint64_t));

  auto shape = [&](ParameterSet& p) {
    p.input_weights.resize(model.hidden_width, model.node_count);
    p.input_bias.resize(model.hidden_width);
    p.hidden_weights.assign(model.hidden_layers - 1,
                            Eigen::MatrixXd(model.hidden_width, model.hidden_width));
    p.hidden_biases.assign(model.hidden_layers - 1,
                           Eigen::VectorXd(model.hidden_width));
    p.output_weights.resize(model.hidden_width);
  };
  shape(model.params);
  shape(model.adam.first);
  shape(model.adam.second);
  read_set(in, model.params);
  read_set(in, model.adam.first);
  read_set(in, model.adam.second);
  return model;
}

}  // namespace neutomo
