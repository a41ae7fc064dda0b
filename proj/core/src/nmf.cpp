#include "neutomo/nmf.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "neutomo/error.hpp"
#include "neutomo/rng.hpp"

namespace neutomo {

void NmfConfig::validate(int node_count) const {
  if (rank < 1) throw Error("nmf rank must be >= 1");
  if (rank >= node_count) throw Error("nmf rank must be < n");
  if (max_iters < 1) throw Error("nmf iteration budget must be >= 1");
  if (!(tol >= 0.0)) throw Error("nmf tolerance must be >= 0");
}

NmfResult nmf_complete(const std::vector<MeasuredPair>& measured, int n,
                       const NmfConfig& config) {
  config.validate(n);
  if (measured.empty()) throw Error("nmf needs at least one measured pair");

  using Eigen::MatrixXd;
  MatrixXd values = MatrixXd::Zero(n, n);
  MatrixXd mask = MatrixXd::Zero(n, n);
  double observed_sum = 0.0;
  for (const MeasuredPair& p : measured) {
    if (p.u < 0 || p.v < 0 || p.u >= n || p.v >= n || p.u == p.v)
      throw Error("measured pair out of range");
    if (p.metric < 0.0) throw Error("nmf input metrics must be non-negative");
    values(p.u, p.v) = p.metric;
    values(p.v, p.u) = p.metric;
    mask(p.u, p.v) = 1.0;
    mask(p.v, p.u) = 1.0;
    observed_sum += 2.0 * p.metric;
  }
  const double observed_mean = observed_sum / (2.0 * measured.size());

  Rng rng(derive_seed(config.seed, "nmf-init"));
  const double init_scale =
      2.0 * std::sqrt(std::max(observed_mean, 1e-12) / config.rank);
  MatrixXd w(n, config.rank), h(config.rank, n);
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w.data()[i] = rng.uniform01() * init_scale;
  for (Eigen::Index i = 0; i < h.size(); ++i)
    h.data()[i] = rng.uniform01() * init_scale;

  const MatrixXd masked_values = mask.array() * values.array();
  auto objective = [&](const MatrixXd& reconstruction) {
    return (mask.array() * (values - reconstruction).array()).square().sum();
  };

  NmfResult result;
  MatrixXd reconstruction = w * h;
  result.objective.push_back(objective(reconstruction));

  // Multiplicative updates stand still where the denominator vanishes (the
  // numerator is zero there too); factors stay non-negative throughout.
  static constexpr double kDenomFloor = 1e-300;
  auto ratio_update = [](MatrixXd& target, const MatrixXd& numer,
                         const MatrixXd& denom) {
    target.array() *= (denom.array() > kDenomFloor)
                          .select(numer.array() / denom.array(), 1.0);
  };

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    MatrixXd numer_h = w.transpose() * masked_values;
    MatrixXd denom_h = w.transpose() * (mask.array() * (w * h).array()).matrix();
    ratio_update(h, numer_h, denom_h);

    MatrixXd numer_w = masked_values * h.transpose();
    MatrixXd denom_w =
        (mask.array() * (w * h).array()).matrix() * h.transpose();
    ratio_update(w, numer_w, denom_w);

    reconstruction.noalias() = w * h;
    const double prev = result.objective.back();
    const double cur = objective(reconstruction);
    result.objective.push_back(cur);
    result.iterations = iter;
    if (prev - cur <= config.tol * std::max(prev, 1.0)) break;
  }

  MatrixXd symmetric = 0.5 * (reconstruction + reconstruction.transpose());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (mask(i, j) == 0.0)
        result.predictions.add(i, j, symmetric(i, j), Provenance::kNmf);
    }
  }
  return result;
}

}  // namespace neutomo
