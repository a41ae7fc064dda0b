#ifndef NEUTOMO_ROUTING_HPP_
#define NEUTOMO_ROUTING_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "neutomo/topology.hpp"

namespace neutomo {

enum class RoutingStrategy {
  kMinHop,           // MHR: fewest hops, metrics evaluated on the chosen path
  kBestPerformance,  // BPR: best metric for the semantics
};

std::string to_string(RoutingStrategy s);
RoutingStrategy routing_strategy_from_string(const std::string& s);

/// Path metric and hop count for every unordered node pair {i, j}, i < j.
class GroundTruthTable {
 public:
  GroundTruthTable(int node_count)
      : n_(node_count),
        metrics_(pair_count(node_count), 0.0),
        hops_(pair_count(node_count), 0) {}

  static std::size_t pair_count(int n) {
    return static_cast<std::size_t>(n) * (n - 1) / 2;
  }

  /// Index of unordered pair {i, j} in row-major upper-triangular order.
  std::size_t pair_index(int i, int j) const;
  /// Inverse of pair_index.
  std::pair<int, int> pair_at(std::size_t index) const;

  int node_count() const { return n_; }
  std::size_t size() const { return metrics_.size(); }

  double metric(int i, int j) const { return metrics_[pair_index(i, j)]; }
  int hops(int i, int j) const { return hops_[pair_index(i, j)]; }
  void set(int i, int j, int hops, double metric);

  const std::vector<double>& metrics() const { return metrics_; }
  const std::vector<int>& hop_counts() const { return hops_; }

  /// CSV "u,v,hops,metric" with a header row.
  void save_csv(const std::filesystem::path& path) const;
  static GroundTruthTable load_csv(const std::filesystem::path& path);

 private:
  int n_;
  std::vector<double> metrics_;
  std::vector<int> hops_;
};

/// Combined metric of a path given its link metrics in path order.
double path_metric(std::span<const double> link_metrics,
                   MetricSemantics semantics);

/// Routes every unordered pair under the strategy and semantics. Among
/// equal-cost paths the lexicographically smallest node sequence (oriented
/// from the smaller endpoint) wins, so results are reproducible and match
/// exhaustive enumeration exactly. Requires a connected topology.
GroundTruthTable route_all_pairs(const Topology& t, RoutingStrategy strategy,
                                 MetricSemantics semantics);

/// Single-source best path costs to every node: least-sum under additive
/// semantics, minimax under congestion. Unreachable nodes get +infinity.
/// Works on disconnected graphs.
std::vector<double> best_path_costs(const Topology& t, int source,
                                    MetricSemantics semantics);

}  // namespace neutomo

#endif  // NEUTOMO_ROUTING_HPP_
