#include "neutomo/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "neutomo/error.hpp"
#include "neutomo/rng.hpp"

namespace neutomo {

std::string to_string(MetricSemantics s) {
  return s == MetricSemantics::kAdditive ? "additive" : "congestion";
}

MetricSemantics metric_semantics_from_string(const std::string& s) {
  if (s == "additive") return MetricSemantics::kAdditive;
  if (s == "congestion") return MetricSemantics::kCongestion;
  throw Error("unknown metric semantics: " + s);
}

std::string to_string(const LinkMetricRegime& r) {
  switch (r.kind) {
    case LinkMetricRegime::Kind::kUnweighted:
      return "unweighted";
    case LinkMetricRegime::Kind::kFromFile:
      return "from-file";
    case LinkMetricRegime::Kind::kUniformRandom: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "uniform(%g,%g)", r.lo, r.hi);
      return buf;
    }
  }
  return "unknown";
}

namespace {

bool bfs_connected(int n, const std::vector<std::vector<std::pair<int, int>>>& adj) {
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    int u = queue.back();
    queue.pop_back();
    for (auto [v, e] : adj[u]) {
      (void)e;
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == n;
}

}  // namespace

Topology Topology::make(int node_count, std::vector<Edge> edges,
                        std::vector<double> metrics,
                        std::vector<std::string> labels,
                        bool metrics_explicit) {
  if (node_count <= 0) throw Error("topology must have at least one node");
  if (edges.size() != metrics.size())
    throw Error("edge and metric counts differ");

  Topology t;
  t.node_count_ = node_count;
  t.metrics_explicit_ = metrics_explicit;
  t.adjacency_.resize(node_count);

  std::vector<char> seen_pair;
  seen_pair.assign(static_cast<std::size_t>(node_count) * node_count, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Edge e = edges[i];
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= node_count)
      throw Error("edge endpoint out of range");
    if (e.u == e.v) throw Error("self-loop rejected");
    std::size_t key = static_cast<std::size_t>(e.u) * node_count + e.v;
    if (seen_pair[key]) throw Error("parallel edge rejected");
    seen_pair[key] = 1;
    if (!(metrics[i] > 0.0))
      throw Error("link metric must be positive");
    int idx = static_cast<int>(t.edges_.size());
    t.edges_.push_back(e);
    t.metrics_.push_back(metrics[i]);
    t.adjacency_[e.u].emplace_back(e.v, idx);
    t.adjacency_[e.v].emplace_back(e.u, idx);
  }
  for (auto& nbrs : t.adjacency_) std::sort(nbrs.begin(), nbrs.end());

  if (labels.empty()) {
    labels.resize(node_count);
    for (int i = 0; i < node_count; ++i) labels[i] = std::to_string(i);
  } else if (static_cast<int>(labels.size()) != node_count) {
    throw Error("label count does not match node count");
  }
  t.labels_ = std::move(labels);
  t.connected_ = bfs_connected(node_count, t.adjacency_);
  return t;
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open topology file: " + path.string());

  std::unordered_map<std::string, int> index_of;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  std::vector<double> metrics;
  std::map<std::pair<int, int>, int> first_line_of;
  bool all_weights_present = true;
  bool any_edge = false;

  auto node_id = [&](const std::string& label) {
    auto it = index_of.find(label);
    if (it != index_of.end()) return it->second;
    int id = static_cast<int>(labels.size());
    index_of.emplace(label, id);
    labels.push_back(label);
    return id;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos)
      line.erase(pos);
    std::istringstream ls(line);
    std::string a, b, w;
    if (!(ls >> a)) continue;  // blank or comment-only
    if (!(ls >> b))
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": expected \"u v [weight]\"");
    double weight = 1.0;
    if (ls >> w) {
      const char* first = w.data();
      const char* last = w.data() + w.size();
      auto [ptr, ec] = std::from_chars(first, last, weight);
      if (ec != std::errc{} || ptr != last || !(weight > 0.0))
        throw Error(path.string() + ":" + std::to_string(line_no) +
                    ": bad weight \"" + w + "\"");
    } else {
      all_weights_present = false;
    }
    std::string extra;
    if (ls >> extra)
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": trailing token \"" + extra + "\"");

    int u = node_id(a), v = node_id(b);
    if (u == v)
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": self-loop on node \"" + a + "\"");
    auto key = std::minmax(u, v);
    auto [it, inserted] = first_line_of.emplace(key, line_no);
    if (!inserted) {
      std::cerr << "neutomo: " << path.string() << ":" << line_no
                << ": duplicate edge " << a << "-" << b
                << " ignored (first seen at line " << it->second << ")\n";
      continue;
    }
    edges.push_back({key.first, key.second});
    metrics.push_back(weight);
    any_edge = true;
  }
  if (!any_edge) throw Error("topology file has no edges: " + path.string());

  // When the labels are exactly the integers 0..n-1, keep them as node ids so
  // serialize -> load round-trips the numbering. Anything else is re-indexed
  // in order of first appearance.
  const int node_count = static_cast<int>(labels.size());
  std::vector<int> remap(node_count, -1);
  bool canonical = true;
  for (int id = 0; id < node_count && canonical; ++id) {
    const std::string& label = labels[id];
    int value = 0;
    auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
    if (ec != std::errc{} || ptr != label.data() + label.size() || value < 0 ||
        value >= node_count || remap[value] != -1) {
      canonical = false;
    } else {
      remap[value] = id;
    }
  }
  if (canonical) {
    for (Edge& e : edges) {
      e.u = std::stoi(labels[e.u]);
      e.v = std::stoi(labels[e.v]);
    }
    for (int i = 0; i < node_count; ++i) labels[i] = std::to_string(i);
  }
  return Topology::make(node_count, std::move(edges), std::move(metrics),
                        std::move(labels), all_weights_present);
}

void save_topology(const Topology& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write topology file: " + path.string());
  out << "# nodes " << t.node_count() << "\n";
  char buf[64];
  for (int i = 0; i < t.edge_count(); ++i) {
    const Edge& e = t.edges()[i];
    std::snprintf(buf, sizeof(buf), "%d %d %.6g\n", e.u, e.v, t.metric(i));
    out << buf;
  }
  if (!out) throw Error("write failed: " + path.string());
}

Topology generate_topology(int n, double target_avg_degree,
                           std::uint64_t seed) {
  if (n < 3) throw Error("generate_topology requires n >= 3");
  if (target_avg_degree < 2.0 || target_avg_degree > n - 1)
    throw Error("target average degree out of reachable range [2, n-1]");

  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  const long long target_edges =
      std::llround(target_avg_degree * n / 2.0);
  if (target_edges > max_edges)
    throw Error("target average degree exceeds complete graph");

  Rng rng(seed);

  // Random spanning tree: attach each node (in random order) to a random
  // earlier node.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<char> present(static_cast<std::size_t>(n) * n, 0);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(target_edges));
  auto add_edge = [&](int u, int v) {
    if (u > v) std::swap(u, v);
    std::size_t key = static_cast<std::size_t>(u) * n + v;
    if (present[key]) return false;
    present[key] = 1;
    edges.push_back({u, v});
    return true;
  };

  for (int i = 1; i < n; ++i) {
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
    add_edge(order[i], order[j]);
  }
  while (static_cast<long long>(edges.size()) < target_edges) {
    int u = static_cast<int>(rng.below(n));
    int v = static_cast<int>(rng.below(n));
    if (u == v) continue;
    add_edge(u, v);
  }

  std::vector<double> metrics(edges.size(), 1.0);
  return Topology::make(n, std::move(edges), std::move(metrics), {},
                        /*metrics_explicit=*/false);
}

Topology assign_link_metrics(const Topology& t, const LinkMetricRegime& regime,
                             std::uint64_t seed) {
  std::vector<double> metrics(t.metrics());
  switch (regime.kind) {
    case LinkMetricRegime::Kind::kUnweighted:
      std::fill(metrics.begin(), metrics.end(), 1.0);
      break;
    case LinkMetricRegime::Kind::kFromFile:
      if (!t.metrics_explicit())
        throw Error(
            "from-file metric regime requires explicit weights in the source "
            "file");
      break;
    case LinkMetricRegime::Kind::kUniformRandom: {
      if (!(regime.lo > 0.0) || regime.hi < regime.lo)
        throw Error("uniform metric range must satisfy 0 < lo <= hi");
      Rng rng(seed);
      for (double& m : metrics) m = rng.uniform(regime.lo, regime.hi);
      break;
    }
  }
  std::vector<std::string> labels;
  labels.reserve(t.node_count());
  for (int i = 0; i < t.node_count(); ++i) labels.push_back(t.label(i));
  std::vector<Edge> edges(t.edges());
  return Topology::make(t.node_count(), std::move(edges), std::move(metrics),
                        std::move(labels), /*metrics_explicit=*/true);
}

}  // namespace neutomo
