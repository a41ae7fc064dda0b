#ifndef NEUTOMO_TOPOLOGY_HPP_
#define NEUTOMO_TOPOLOGY_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace neutomo {

/// How a path metric combines the metrics of its links.
enum class MetricSemantics {
  kAdditive,    // sum of link metrics (delay, hop count)
  kCongestion,  // max of link metrics (most congested link)
};

std::string to_string(MetricSemantics s);
MetricSemantics metric_semantics_from_string(const std::string& s);

struct LinkMetricRegime {
  enum class Kind { kUnweighted, kFromFile, kUniformRandom };
  Kind kind = Kind::kUnweighted;
  double lo = 1.0;
  double hi = 10.0;

  static LinkMetricRegime unweighted() { return {Kind::kUnweighted, 1.0, 1.0}; }
  static LinkMetricRegime from_file() { return {Kind::kFromFile, 0.0, 0.0}; }
  static LinkMetricRegime uniform_random(double lo = 1.0, double hi = 10.0) {
    return {Kind::kUniformRandom, lo, hi};
  }
};

std::string to_string(const LinkMetricRegime& r);

/// Undirected edge with canonical endpoint order (u < v).
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// An undirected weighted graph with dense node ids 0..n-1, immutable after
/// construction. Link metrics are strictly positive.
class Topology {
 public:
  /// Validates and builds: rejects self-loops, duplicate edges, out-of-range
  /// ids and non-positive metrics. `labels` maps node id back to the label it
  /// carried in the source file (empty means "use the id itself").
  static Topology make(int node_count, std::vector<Edge> edges,
                       std::vector<double> metrics,
                       std::vector<std::string> labels = {},
                       bool metrics_explicit = true);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  double metric(int edge_index) const { return metrics_[edge_index]; }
  const std::vector<double>& metrics() const { return metrics_; }

  /// (neighbor id, edge index) pairs, sorted by neighbor id.
  const std::vector<std::pair<int, int>>& neighbors(int node) const {
    return adjacency_[node];
  }

  bool is_connected() const { return connected_; }
  double average_degree() const {
    return 2.0 * static_cast<double>(edges_.size()) / node_count_;
  }

  /// True when every metric was given explicitly (file weights or an applied
  /// regime) rather than defaulted during ingestion.
  bool metrics_explicit() const { return metrics_explicit_; }

  const std::string& label(int node) const { return labels_[node]; }

 private:
  Topology() = default;

  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> metrics_;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
  bool connected_ = false;
  bool metrics_explicit_ = true;
};

/// Reads a whitespace-separated edge list: "u v [weight]" per line, '#'
/// starts a comment. Node labels are re-indexed to 0..n-1 in order of first
/// appearance; duplicate edges keep the first weight (with a warning on
/// stderr); missing weights default to 1.0 and mark the topology as carrying
/// defaulted metrics.
Topology load_topology(const std::filesystem::path& path);

/// Writes the same edge-list format with 6-significant-digit weights.
void save_topology(const Topology& t, const std::filesystem::path& path);

/// Connected random graph: a random spanning tree plus uniformly random extra
/// edges until the edge count reaches round(target_avg_degree * n / 2).
/// Requires n >= 3 and 2 <= target_avg_degree <= n - 1. All metrics start at
/// 1.0 (defaulted).
Topology generate_topology(int n, double target_avg_degree,
                           std::uint64_t seed);

/// Returns a copy of `t` with metrics drawn from the regime. kFromFile keeps
/// the existing metrics and requires them to have been explicit in the file.
Topology assign_link_metrics(const Topology& t, const LinkMetricRegime& regime,
                             std::uint64_t seed);

}  // namespace neutomo

#endif  // NEUTOMO_TOPOLOGY_HPP_
