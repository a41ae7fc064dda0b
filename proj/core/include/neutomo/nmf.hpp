#ifndef NEUTOMO_NMF_HPP_
#define NEUTOMO_NMF_HPP_

#include <cstdint>
#include <vector>

#include "neutomo/prediction.hpp"
#include "neutomo/sampling.hpp"

namespace neutomo {

struct NmfConfig {
  int rank = 16;
  int max_iters = 2000;
  double tol = 1e-6;  // relative objective improvement below which we stop
  std::uint64_t seed = 0;

  void validate(int node_count) const;
};

struct NmfResult {
  PredictionTable predictions;      // every unmeasured pair, provenance "nmf"
  std::vector<double> objective;    // masked squared error, incl. the initial value
  int iterations = 0;
};

/// Masked non-negative matrix factorization of the symmetric pair-metric
/// matrix: multiplicative updates minimize the squared error over observed
/// entries only, and predictions are the symmetrized reconstruction
/// (WH + (WH)^T) / 2 at the unmeasured pairs. The observed-entry objective is
/// non-increasing across iterations.
NmfResult nmf_complete(const std::vector<MeasuredPair>& measured, int n,
                       const NmfConfig& config);

}  // namespace neutomo

#endif  // NEUTOMO_NMF_HPP_
