#include "neutomo/prediction.hpp"

#include <fstream>
#include <sstream>

#include "neutomo/error.hpp"
#include "neutomo/format.hpp"

namespace neutomo {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kModel:
      return "model";
    case Provenance::kPat:
      return "pat";
    case Provenance::kNmf:
      return "nmf";
  }
  return "unknown";
}

namespace {

Provenance provenance_from_string(const std::string& s) {
  if (s == "model") return Provenance::kModel;
  if (s == "pat") return Provenance::kPat;
  if (s == "nmf") return Provenance::kNmf;
  throw Error("unknown provenance: " + s);
}

}  // namespace

void PredictionTable::save_csv(const std::filesystem::path& path,
                               bool with_provenance) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write: " + path.string());
  out << (with_provenance ? "u,v,predicted,provenance" : "u,v,predicted")
      << '\n';
  for (const Prediction& p : rows_) {
    out << p.u << ',' << p.v << ',' << format_double(p.value);
    if (with_provenance) out << ',' << to_string(p.provenance);
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

PredictionTable PredictionTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("empty prediction file");
  bool with_provenance;
  if (line == "u,v,predicted,provenance") {
    with_provenance = true;
  } else if (line == "u,v,predicted") {
    with_provenance = false;
  } else {
    throw Error("unexpected header in " + path.string() + ": " + line);
  }

  PredictionTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != (with_provenance ? 4u : 3u))
      throw Error("bad row in " + path.string() + ": " + line);
    Prediction p;
    p.u = static_cast<int>(parse_long(fields[0]));
    p.v = static_cast<int>(parse_long(fields[1]));
    p.value = parse_double(fields[2]);
    p.provenance = with_provenance ? provenance_from_string(fields[3])
                                   : Provenance::kModel;
    table.rows_.push_back(p);
  }
  return table;
}

}  // namespace neutomo
