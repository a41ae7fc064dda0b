#ifndef NEUTOMO_SAMPLING_HPP_
#define NEUTOMO_SAMPLING_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "neutomo/routing.hpp"

namespace neutomo {

enum class SamplingMethod { kRandom, kMonitorBased };

std::string to_string(SamplingMethod m);
SamplingMethod sampling_method_from_string(const std::string& s);

struct MeasuredPair {
  int u = 0;
  int v = 0;
  double metric = 0.0;
};

/// The measured pair set S and its complement T\S, with the coverage
/// invariant: every node appears in at least one measured pair.
class MeasurementSet {
 public:
  MeasurementSet(int node_count, SamplingMethod method, double ratio,
                 std::vector<MeasuredPair> measured,
                 std::vector<MeasuredPair> heldout, std::vector<int> monitors)
      : n_(node_count),
        method_(method),
        ratio_(ratio),
        measured_(std::move(measured)),
        heldout_(std::move(heldout)),
        monitors_(std::move(monitors)) {}

  int node_count() const { return n_; }
  SamplingMethod method() const { return method_; }
  double ratio() const { return ratio_; }
  const std::vector<MeasuredPair>& measured() const { return measured_; }
  const std::vector<MeasuredPair>& heldout() const { return heldout_; }
  /// Monitor node ids (empty under random sampling), ascending.
  const std::vector<int>& monitors() const { return monitors_; }

  /// Writes measured.csv and heldout.csv ("u,v,metric") into a directory.
  void save(const std::filesystem::path& dir) const;

 private:
  int n_;
  SamplingMethod method_;
  double ratio_;
  std::vector<MeasuredPair> measured_;
  std::vector<MeasuredPair> heldout_;
  std::vector<int> monitors_;
};

void save_pairs_csv(const std::vector<MeasuredPair>& pairs,
                    const std::filesystem::path& path);
std::vector<MeasuredPair> load_pairs_csv(const std::filesystem::path& path);

/// Uniform sample of round(ratio*|T|) pairs, repaired so that every node is
/// covered. Requires 0 < ratio < 1 and floor(ratio*|T|) >= n/2.
MeasurementSet sample_random(const GroundTruthTable& gt, double ratio,
                             std::uint64_t seed);

/// Monitor-based sampling: picks the smallest monitor count whose pair pool
/// reaches the target size (bumped up when node coverage is otherwise
/// impossible at the exact target), then subsamples the pool down to
/// round(ratio*|T|) pairs while preserving coverage. Every measured pair
/// contains at least one monitor.
MeasurementSet sample_monitor_based(const GroundTruthTable& gt, double ratio,
                                    std::uint64_t seed);

/// Smallest rho with rho*n - rho*(rho+1)/2 >= target.
int monitor_count_for_target(int n, long long target);

/// Number of unordered pairs containing at least one of rho monitors.
long long monitor_candidate_pairs(int n, int rho);

}  // namespace neutomo

#endif  // NEUTOMO_SAMPLING_HPP_
