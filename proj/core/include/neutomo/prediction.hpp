#ifndef NEUTOMO_PREDICTION_HPP_
#define NEUTOMO_PREDICTION_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace neutomo {

/// Where a predicted pair value came from.
enum class Provenance { kModel, kPat, kNmf };

std::string to_string(Provenance p);

struct Prediction {
  int u = 0;
  int v = 0;
  double value = 0.0;
  Provenance provenance = Provenance::kModel;
};

/// Per-pair predicted metric values.
class PredictionTable {
 public:
  PredictionTable() = default;
  explicit PredictionTable(std::vector<Prediction> rows) : rows_(std::move(rows)) {}

  const std::vector<Prediction>& rows() const { return rows_; }
  std::vector<Prediction>& rows() { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  void add(int u, int v, double value, Provenance prov = Provenance::kModel) {
    rows_.push_back({u, v, value, prov});
  }

  /// CSV "u,v,predicted", plus a provenance column when requested.
  void save_csv(const std::filesystem::path& path,
                bool with_provenance = false) const;
  static PredictionTable load_csv(const std::filesystem::path& path);

 private:
  std::vector<Prediction> rows_;
};

}  // namespace neutomo

#endif  // NEUTOMO_PREDICTION_HPP_
