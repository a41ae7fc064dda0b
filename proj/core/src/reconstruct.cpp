#include "neutomo/reconstruct.hpp"

#include <fstream>
#include <sstream>

#include "neutomo/error.hpp"

namespace neutomo {

ExtendedAdjacency::ExtendedAdjacency(int node_count, int m)
    : n_(node_count), m_(m) {
  if (node_count < 2) throw Error("adjacency needs at least two nodes");
  if (m < 1) throw Error("hop distance m must be >= 1");
  bits_.assign(static_cast<std::size_t>(n_) * (n_ - 1) / 2, 0);
}

std::size_t ExtendedAdjacency::index(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
    throw Error("invalid node pair");
  if (i > j) std::swap(i, j);
  return static_cast<std::size_t>(i) * n_ -
         static_cast<std::size_t>(i) * (i + 1) / 2 + (j - i - 1);
}

bool ExtendedAdjacency::at(int i, int j) const { return bits_[index(i, j)]; }

void ExtendedAdjacency::set(int i, int j, bool value) {
  bits_[index(i, j)] = value ? 1 : 0;
}

long long ExtendedAdjacency::nonzero_pairs() const {
  long long count = 0;
  for (char b : bits_) count += b;
  return count;
}

ExtendedAdjacency ExtendedAdjacency::from_pair_values(
    int node_count, std::span<const double> values, int m) {
  ExtendedAdjacency a(node_count, m);
  if (values.size() != a.bits_.size())
    throw Error("pair value count does not match the node count");
  const double lo = m - 0.5, hi = m + 0.5;
  for (std::size_t idx = 0; idx < values.size(); ++idx)
    a.bits_[idx] = (values[idx] > lo && values[idx] <= hi) ? 1 : 0;
  return a;
}

void ExtendedAdjacency::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write: " + path.string());
  out << "# m=" << m_ << " n=" << n_ << "\n";
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (at(i, j)) out << i << ' ' << j << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

ExtendedAdjacency ExtendedAdjacency::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw Error("empty adjacency file");
  int m = 0, n = 0;
  if (std::sscanf(header.c_str(), "# m=%d n=%d", &m, &n) != 2)
    throw Error("bad adjacency header: " + header);
  ExtendedAdjacency a(n, m);
  int i, j;
  while (in >> i >> j) a.set(i, j, true);
  return a;
}

ReconstructionScore score(const ExtendedAdjacency& predicted,
                          const ExtendedAdjacency& truth, CountingMode mode) {
  if (predicted.node_count() != truth.node_count())
    throw Error("adjacency sizes differ");
  if (predicted.m() != truth.m()) throw Error("adjacency orders differ");

  const int n = truth.node_count();
  long long false_pos = 0, false_neg = 0, tau = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool p = predicted.at(i, j), t = truth.at(i, j);
      tau += t;
      false_pos += (p && !t);
      false_neg += (!p && t);
    }
  }

  ReconstructionScore s;
  s.m = truth.m();
  s.true_nonzeros = tau;
  if (mode == CountingMode::kUnorderedPairs) {
    const long long pairs = static_cast<long long>(n) * (n - 1) / 2;
    if (pairs - tau > 0)
      s.fpr = static_cast<double>(false_pos) / static_cast<double>(pairs - tau);
    if (tau > 0)
      s.fnr = static_cast<double>(false_neg) / static_cast<double>(tau);
  } else {
    // Ordered entries double both triangles; the n^2 denominator keeps the
    // diagonal, matching the matrix-difference formulation.
    const long long entries = static_cast<long long>(n) * n;
    if (entries - 2 * tau > 0)
      s.fpr = static_cast<double>(2 * false_pos) /
              static_cast<double>(entries - 2 * tau);
    if (tau > 0)
      s.fnr = static_cast<double>(2 * false_neg) / static_cast<double>(2 * tau);
  }
  return s;
}

}  // namespace neutomo
