#include "neutomo/metrics.hpp"

#include <cmath>
#include <sstream>

#include "neutomo/error.hpp"
#include "neutomo/format.hpp"

namespace neutomo {

double mape(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.empty() || predicted.size() != truth.size())
    throw Error("mape needs equal-length, nonempty inputs");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!(truth[i] > 0.0)) throw Error("mape is undefined for zero truth values");
    acc += std::abs(predicted[i] - truth[i]) / truth[i];
  }
  return 100.0 * acc / static_cast<double>(predicted.size());
}

std::map<long long, double> unit_histogram(std::span<const double> samples) {
  std::map<long long, double> hist;
  const double mass = 1.0 / static_cast<double>(samples.size());
  for (double x : samples)
    hist[static_cast<long long>(std::ceil(x - 0.5))] += mass;
  return hist;
}

double distribution_distance(std::span<const double> predicted,
                             std::span<const double> truth) {
  if (predicted.empty() || truth.empty())
    throw Error("distribution distance needs nonempty samples");
  auto hp = unit_histogram(predicted);
  auto ht = unit_histogram(truth);
  double dist = 0.0;
  for (const auto& [bin, mass] : hp) {
    auto it = ht.find(bin);
    dist += std::abs(mass - (it == ht.end() ? 0.0 : it->second));
  }
  for (const auto& [bin, mass] : ht) {
    if (!hp.contains(bin)) dist += mass;
  }
  return dist;
}

EvalReport evaluate_predictions(std::span<const double> predicted,
                                std::span<const double> truth) {
  EvalReport report;
  report.per_pair_ape.reserve(predicted.size());
  report.mape = mape(predicted, truth);
  for (std::size_t i = 0; i < predicted.size(); ++i)
    report.per_pair_ape.push_back(100.0 * std::abs(predicted[i] - truth[i]) /
                                  truth[i]);
  report.histogram_l1 = distribution_distance(predicted, truth);
  return report;
}

std::string EvalReport::csv_header() {
  return "network,regime,strategy,semantics,sampling,ratio,method,seed,mape,"
         "histogram_l1";
}

std::string EvalReport::csv_row() const {
  std::ostringstream out;
  out << network << ',' << regime << ',' << strategy << ',' << semantics << ','
      << sampling << ',' << format_double(ratio) << ',' << method << ','
      << seed << ',' << format_double(mape) << ','
      << format_double(histogram_l1);
  return out.str();
}

}  // namespace neutomo
