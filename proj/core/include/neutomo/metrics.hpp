#ifndef NEUTOMO_METRICS_HPP_
#define NEUTOMO_METRICS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace neutomo {

/// Mean absolute percentage error, in percent. Truth values must be positive.
double mape(std::span<const double> predicted, std::span<const double> truth);

/// L1 distance between unit-width normalized histograms of the two samples,
/// over the union of occupied bins; ranges over [0, 2]. Bin k covers
/// (k - 0.5, k + 0.5], matching the reconstruction rule.
double distribution_distance(std::span<const double> predicted,
                             std::span<const double> truth);

/// Normalized unit-width histogram: bin index -> mass.
std::map<long long, double> unit_histogram(std::span<const double> samples);

struct EvalReport {
  double mape = 0.0;                 // percent, over held-out pairs
  std::vector<double> per_pair_ape;  // percent, same order as the pair list
  double histogram_l1 = 0.0;

  // Cell metadata (audit trail).
  std::string network;
  std::string regime;
  std::string strategy;
  std::string semantics;
  std::string sampling;
  double ratio = 0.0;
  std::string method;
  std::uint64_t seed = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Computes the report body (mape, per-pair errors, histogram distance) from
/// aligned prediction/truth vectors; metadata is left for the caller.
EvalReport evaluate_predictions(std::span<const double> predicted,
                                std::span<const double> truth);

}  // namespace neutomo

#endif  // NEUTOMO_METRICS_HPP_
