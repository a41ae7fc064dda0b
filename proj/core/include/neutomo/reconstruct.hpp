#ifndef NEUTOMO_RECONSTRUCT_HPP_
#define NEUTOMO_RECONSTRUCT_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace neutomo {

/// Binary symmetric matrix marking pairs whose path metric falls in
/// (m - 0.5, m + 0.5]; A^(1) is the ordinary adjacency matrix.
class ExtendedAdjacency {
 public:
  ExtendedAdjacency(int node_count, int m);

  /// Builds A^(m) from per-pair values indexed like GroundTruthTable
  /// (upper-triangular pair order).
  static ExtendedAdjacency from_pair_values(int node_count,
                                            std::span<const double> values,
                                            int m);

  int node_count() const { return n_; }
  int m() const { return m_; }
  bool at(int i, int j) const;
  void set(int i, int j, bool value);
  long long nonzero_pairs() const;

  /// Sparse pair list "i j" per line under a "# m=<m> n=<n>" header.
  void save(const std::filesystem::path& path) const;
  static ExtendedAdjacency load(const std::filesystem::path& path);

 private:
  std::size_t index(int i, int j) const;
  int n_;
  int m_;
  std::vector<char> bits_;
};

/// Whether unordered pairs or ordered matrix entries (including both
/// triangles and the diagonal in the denominator) are counted.
enum class CountingMode { kUnorderedPairs, kOrderedEntries };

struct ReconstructionScore {
  int m = 0;
  long long true_nonzeros = 0;          // tau
  std::optional<double> fpr;            // empty when every pair is a true edge
  std::optional<double> fnr;            // empty when tau == 0
};

/// FPR = false positives / (pairs - tau), FNR = false negatives / tau.
ReconstructionScore score(const ExtendedAdjacency& predicted,
                          const ExtendedAdjacency& truth,
                          CountingMode mode = CountingMode::kUnorderedPairs);

}  // namespace neutomo

#endif  // NEUTOMO_RECONSTRUCT_HPP_
