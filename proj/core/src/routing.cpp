#include "neutomo/routing.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "neutomo/error.hpp"
#include "neutomo/format.hpp"

namespace neutomo {

std::string to_string(RoutingStrategy s) {
  return s == RoutingStrategy::kMinHop ? "mhr" : "bpr";
}

RoutingStrategy routing_strategy_from_string(const std::string& s) {
  if (s == "mhr") return RoutingStrategy::kMinHop;
  if (s == "bpr") return RoutingStrategy::kBestPerformance;
  throw Error("unknown routing strategy: " + s);
}

std::size_t GroundTruthTable::pair_index(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
    throw Error("invalid node pair");
  if (i > j) std::swap(i, j);
  return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i + 1) / 2 +
         (j - i - 1);
}

std::pair<int, int> GroundTruthTable::pair_at(std::size_t index) const {
  // Walk rows; n is small enough that this is never hot.
  std::size_t row_len = static_cast<std::size_t>(n_) - 1;
  int i = 0;
  while (index >= row_len) {
    index -= row_len;
    --row_len;
    ++i;
  }
  return {i, i + 1 + static_cast<int>(index)};
}

void GroundTruthTable::set(int i, int j, int hops, double metric) {
  std::size_t idx = pair_index(i, j);
  hops_[idx] = hops;
  metrics_[idx] = metric;
}

void GroundTruthTable::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write: " + path.string());
  out << "u,v,hops,metric\n";
  for (std::size_t idx = 0; idx < size(); ++idx) {
    auto [u, v] = pair_at(idx);
    out << u << ',' << v << ',' << hops_[idx] << ','
        << format_double(metrics_[idx]) << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

GroundTruthTable GroundTruthTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("u,v,hops,metric", 0) != 0)
    throw Error("missing header in " + path.string());

  struct Row {
    int u, v, hops;
    double metric;
  };
  std::vector<Row> rows;
  int max_node = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[4];
    for (int i = 0; i < 4; ++i)
      if (!std::getline(ls, f[i], i == 3 ? '\n' : ','))
        throw Error("bad row in " + path.string() + ": " + line);
    Row r{static_cast<int>(parse_long(f[0])), static_cast<int>(parse_long(f[1])),
          static_cast<int>(parse_long(f[2])), parse_double(f[3])};
    max_node = std::max({max_node, r.u, r.v});
    rows.push_back(r);
  }
  GroundTruthTable table(max_node + 1);
  if (rows.size() != table.size())
    throw Error("ground-truth table is not complete over all pairs");
  for (const Row& r : rows) table.set(r.u, r.v, r.hops, r.metric);
  return table;
}

double path_metric(std::span<const double> link_metrics,
                   MetricSemantics semantics) {
  if (link_metrics.empty()) throw Error("path has no links");
  double acc = link_metrics[0];
  for (std::size_t i = 1; i < link_metrics.size(); ++i) {
    acc = semantics == MetricSemantics::kAdditive ? acc + link_metrics[i]
                                                  : std::max(acc, link_metrics[i]);
  }
  return acc;
}

namespace {

enum class PathCost { kHops, kSum, kMax };

constexpr double kInf = std::numeric_limits<double>::infinity();

double combine(PathCost mode, double cost, double link) {
  switch (mode) {
    case PathCost::kHops:
      return cost + 1.0;
    case PathCost::kSum:
      return cost + link;
    case PathCost::kMax:
      return std::max(cost, link);
  }
  return kInf;
}

// Dijkstra from `source` seeded with `initial`, skipping banned nodes. Costs
// accumulate in path order from the source, so sums are bit-identical to a
// left-to-right evaluation of the chosen walk.
void dijkstra_from(const Topology& t, PathCost mode, int source, double initial,
                   const std::vector<char>& banned, std::vector<double>& dist) {
  const int n = t.node_count();
  dist.assign(n, kInf);
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>>
      heap;
  dist[source] = initial;
  heap.emplace(initial, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (auto [v, e] : t.neighbors(u)) {
      if (banned[v]) continue;
      double nd = combine(mode, d, t.metric(e));
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
}

// Lexicographically smallest node sequence among minimum-cost simple paths
// from s to t. Each step commits the smallest neighbor that still completes
// to the optimal total; feasibility is certified by a Dijkstra seeded with
// the exact prefix cost, so comparisons never suffer from re-associated sums.
std::vector<int> best_path(const Topology& t, PathCost mode, int s, int target,
                           double optimal, std::vector<char>& banned,
                           std::vector<double>& scratch) {
  std::vector<int> path{s};
  std::fill(banned.begin(), banned.end(), 0);
  banned[s] = 1;
  int cur = s;
  double prefix = 0.0;
  while (cur != target) {
    int chosen = -1;
    double chosen_cost = kInf;
    for (auto [v, e] : t.neighbors(cur)) {
      if (banned[v]) continue;
      double c2 = combine(mode, prefix, t.metric(e));
      double total;
      if (v == target) {
        total = c2;
      } else {
        dijkstra_from(t, mode, v, c2, banned, scratch);
        total = scratch[target];
      }
      if (total == optimal) {
        chosen = v;
        chosen_cost = c2;
        break;
      }
    }
    if (chosen < 0)
      throw Error("internal routing error: optimal path lost");  // unreachable
    path.push_back(chosen);
    banned[chosen] = 1;
    prefix = chosen_cost;
    cur = chosen;
  }
  return path;
}

std::vector<double> links_of(const Topology& t, const std::vector<int>& path) {
  std::vector<double> links;
  links.reserve(path.size() - 1);
  for (std::size_t i = 1; i < path.size(); ++i) {
    for (auto [v, e] : t.neighbors(path[i - 1])) {
      if (v == path[i]) {
        links.push_back(t.metric(e));
        break;
      }
    }
  }
  return links;
}

void require_connected(const Topology& t) {
  if (t.is_connected()) return;
  // Identify components to report a few unreachable pairs.
  const int n = t.node_count();
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> stack{start};
    comp[start] = ncomp;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (auto [v, e] : t.neighbors(u)) {
        (void)e;
        if (comp[v] < 0) {
          comp[v] = ncomp;
          stack.push_back(v);
        }
      }
    }
    ++ncomp;
  }
  std::ostringstream msg;
  msg << "topology is disconnected (" << ncomp << " components); unreachable pairs:";
  int listed = 0;
  for (int i = 0; i < n && listed < 8; ++i)
    for (int j = i + 1; j < n && listed < 8; ++j)
      if (comp[i] != comp[j]) {
        msg << " {" << i << "," << j << "}";
        ++listed;
      }
  msg << " ...";
  throw Error(msg.str());
}

}  // namespace

std::vector<double> best_path_costs(const Topology& t, int source,
                                    MetricSemantics semantics) {
  if (source < 0 || source >= t.node_count()) throw Error("source out of range");
  PathCost mode = semantics == MetricSemantics::kAdditive ? PathCost::kSum
                                                          : PathCost::kMax;
  std::vector<char> none(t.node_count(), 0);
  std::vector<double> dist;
  dijkstra_from(t, mode, source, 0.0, none, dist);
  return dist;
}

GroundTruthTable route_all_pairs(const Topology& t, RoutingStrategy strategy,
                                 MetricSemantics semantics) {
  require_connected(t);
  const int n = t.node_count();
  GroundTruthTable table(n);

  PathCost mode;
  if (strategy == RoutingStrategy::kMinHop) {
    mode = PathCost::kHops;
  } else {
    mode = semantics == MetricSemantics::kAdditive ? PathCost::kSum
                                                   : PathCost::kMax;
  }

  std::vector<char> banned(n, 0);
  std::vector<double> scratch(n, 0.0);
  std::vector<double> opt(n, 0.0);
  std::vector<char> none(n, 0);
  for (int s = 0; s < n; ++s) {
    dijkstra_from(t, mode, s, 0.0, none, opt);
    for (int v = s + 1; v < n; ++v) {
      std::vector<int> path = best_path(t, mode, s, v, opt[v], banned, scratch);
      std::vector<double> links = links_of(t, path);
      table.set(s, v, static_cast<int>(links.size()),
                path_metric(links, semantics));
    }
  }
  return table;
}

}  // namespace neutomo
