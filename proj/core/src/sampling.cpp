#include "neutomo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "neutomo/error.hpp"
#include "neutomo/format.hpp"
#include "neutomo/rng.hpp"

namespace neutomo {

std::string to_string(SamplingMethod m) {
  return m == SamplingMethod::kRandom ? "random" : "monitor";
}

SamplingMethod sampling_method_from_string(const std::string& s) {
  if (s == "random") return SamplingMethod::kRandom;
  if (s == "monitor") return SamplingMethod::kMonitorBased;
  throw Error("unknown sampling method: " + s);
}

void save_pairs_csv(const std::vector<MeasuredPair>& pairs,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write: " + path.string());
  out << "u,v,metric\n";
  for (const MeasuredPair& p : pairs)
    out << p.u << ',' << p.v << ',' << format_double(p.metric) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<MeasuredPair> load_pairs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("u,v,metric", 0) != 0)
    throw Error("missing header in " + path.string());
  std::vector<MeasuredPair> pairs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[3];
    for (int i = 0; i < 3; ++i)
      if (!std::getline(ls, f[i], i == 2 ? '\n' : ','))
        throw Error("bad row in " + path.string() + ": " + line);
    pairs.push_back({static_cast<int>(parse_long(f[0])),
                     static_cast<int>(parse_long(f[1])), parse_double(f[2])});
  }
  return pairs;
}

void MeasurementSet::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_pairs_csv(measured_, dir / "measured.csv");
  save_pairs_csv(heldout_, dir / "heldout.csv");
}

int monitor_count_for_target(int n, long long target) {
  for (int rho = 1; rho <= n; ++rho) {
    if (monitor_candidate_pairs(n, rho) >= target) return rho;
  }
  throw Error("no monitor count reaches the requested sample size");
}

long long monitor_candidate_pairs(int n, int rho) {
  return static_cast<long long>(rho) * n -
         static_cast<long long>(rho) * (rho + 1) / 2;
}

namespace {

// Swaps unselected pairs in for every uncovered node. The outgoing pair is
// drawn uniformly among pairs that stay redundant once the incoming pair is
// added: either both endpoints keep other coverage, or one endpoint is the
// incoming partner itself. `allowed_partner` restricts incoming pairs (pool
// membership under monitor-based sampling). Returns false when stuck.
bool repair_coverage(const GroundTruthTable& gt, std::vector<char>& selected,
                     const std::vector<char>& in_pool,
                     const std::vector<char>& is_monitor, bool monitor_mode,
                     Rng& rng) {
  const int n = gt.node_count();
  std::vector<int> cover(n, 0);
  std::vector<std::size_t> selected_list;
  for (std::size_t idx = 0; idx < gt.size(); ++idx) {
    if (!selected[idx]) continue;
    auto [u, v] = gt.pair_at(idx);
    ++cover[u];
    ++cover[v];
    selected_list.push_back(idx);
  }

  auto partner_ok = [&](int w, int x) {
    if (x == w) return false;
    if (!monitor_mode) return true;
    return is_monitor[w] || is_monitor[x];
  };

  for (int w = 0; w < n; ++w) {
    if (cover[w] > 0) continue;

    // Outgoing candidates whose removal keeps everyone covered outright.
    std::vector<std::size_t> both_redundant;
    // Pairs {x, y} where only y has spare coverage; removable if the incoming
    // pair is {w, x}.
    std::vector<std::pair<std::size_t, int>> semi_redundant;
    for (std::size_t idx : selected_list) {
      auto [a, b] = gt.pair_at(idx);
      bool spare_a = cover[a] >= 2, spare_b = cover[b] >= 2;
      if (spare_a && spare_b) {
        both_redundant.push_back(idx);
      } else if (spare_a && partner_ok(w, b)) {
        semi_redundant.emplace_back(idx, b);
      } else if (spare_b && partner_ok(w, a)) {
        semi_redundant.emplace_back(idx, a);
      }
    }

    std::size_t out_idx;
    int partner;
    if (!both_redundant.empty()) {
      out_idx = both_redundant[rng.below(both_redundant.size())];
      std::vector<int> partners;
      for (int x = 0; x < n; ++x)
        if (partner_ok(w, x) && in_pool[gt.pair_index(std::min(w, x), std::max(w, x))] &&
            !selected[gt.pair_index(std::min(w, x), std::max(w, x))])
          partners.push_back(x);
      if (partners.empty()) return false;
      partner = partners[rng.below(partners.size())];
    } else if (!semi_redundant.empty()) {
      auto [idx, x] = semi_redundant[rng.below(semi_redundant.size())];
      std::size_t in_idx = gt.pair_index(std::min(w, x), std::max(w, x));
      if (!in_pool[in_idx] || selected[in_idx]) return false;
      out_idx = idx;
      partner = x;
    } else {
      return false;
    }

    std::size_t in_idx = gt.pair_index(std::min(w, partner), std::max(w, partner));
    auto [a, b] = gt.pair_at(out_idx);
    selected[out_idx] = 0;
    --cover[a];
    --cover[b];
    selected[in_idx] = 1;
    ++cover[w];
    ++cover[partner];
    selected_list.erase(std::find(selected_list.begin(), selected_list.end(), out_idx));
    selected_list.push_back(in_idx);
    if (cover[a] == 0 || cover[b] == 0) return false;  // should not happen
  }
  return true;
}

MeasurementSet finalize(const GroundTruthTable& gt, SamplingMethod method,
                        double ratio, const std::vector<char>& selected,
                        std::vector<int> monitors) {
  std::vector<MeasuredPair> measured, heldout;
  for (std::size_t idx = 0; idx < gt.size(); ++idx) {
    auto [u, v] = gt.pair_at(idx);
    MeasuredPair p{u, v, gt.metrics()[idx]};
    (selected[idx] ? measured : heldout).push_back(p);
  }
  return MeasurementSet(gt.node_count(), method, ratio, std::move(measured),
                        std::move(heldout), std::move(monitors));
}

long long target_size(const GroundTruthTable& gt, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("ratio must lie in (0, 1)");
  const long long total = static_cast<long long>(gt.size());
  const long long target = std::llround(ratio * static_cast<double>(total));
  if (2 * static_cast<long long>(std::floor(ratio * total)) < gt.node_count())
    throw Error("ratio too small to cover every node");
  if (target < 1) throw Error("requested sample is empty");
  return std::min(target, total);
}

}  // namespace

MeasurementSet sample_random(const GroundTruthTable& gt, double ratio,
                             std::uint64_t seed) {
  const long long target = target_size(gt, ratio);
  Rng rng(seed);
  std::vector<char> selected(gt.size(), 0);
  for (std::size_t idx : rng.sample_indices(gt.size(), target)) selected[idx] = 1;

  std::vector<char> in_pool(gt.size(), 1);
  std::vector<char> is_monitor(gt.node_count(), 0);
  if (!repair_coverage(gt, selected, in_pool, is_monitor, false, rng))
    throw Error("node coverage unrepairable at the requested ratio");
  return finalize(gt, SamplingMethod::kRandom, ratio, selected, {});
}

MeasurementSet sample_monitor_based(const GroundTruthTable& gt, double ratio,
                                    std::uint64_t seed) {
  const int n = gt.node_count();
  const long long target = target_size(gt, ratio);
  Rng rng(seed);

  for (int rho = monitor_count_for_target(n, target); rho <= n; ++rho) {
    // Coverage needs one pair per non-monitor plus pairs for monitors that
    // would otherwise stay unseen.
    const long long q = n - rho;
    long long need = q + std::max<long long>(0, (rho - q + 1) / 2);
    if (target < need || target > monitor_candidate_pairs(n, rho)) continue;

    std::vector<std::size_t> monitor_idx = rng.sample_indices(n, rho);
    std::vector<int> monitors(monitor_idx.begin(), monitor_idx.end());
    std::sort(monitors.begin(), monitors.end());
    std::vector<char> is_monitor(n, 0);
    for (int m : monitors) is_monitor[m] = 1;

    std::vector<std::size_t> pool;
    std::vector<char> in_pool(gt.size(), 0);
    for (std::size_t idx = 0; idx < gt.size(); ++idx) {
      auto [u, v] = gt.pair_at(idx);
      if (is_monitor[u] || is_monitor[v]) {
        pool.push_back(idx);
        in_pool[idx] = 1;
      }
    }

    std::vector<char> selected(gt.size(), 0);
    for (std::size_t k : rng.sample_indices(pool.size(), target))
      selected[pool[k]] = 1;
    if (repair_coverage(gt, selected, in_pool, is_monitor, true, rng))
      return finalize(gt, SamplingMethod::kMonitorBased, ratio, selected,
                      std::move(monitors));
  }
  throw Error("monitor-based coverage unrepairable at the requested ratio");
}

}  // namespace neutomo
