#include "neutomo/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "neutomo/error.hpp"
#include "neutomo/format.hpp"
#include "neutomo/reconstruct.hpp"
#include "neutomo/rng.hpp"

namespace neutomo {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::kNeuTomo:
      return "neutomo";
    case Method::kNeuTomoPat:
      return "neutomo+pat";
    case Method::kNmf:
      return "nmf";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "neutomo") return Method::kNeuTomo;
  if (s == "neutomo+pat") return Method::kNeuTomoPat;
  if (s == "nmf") return Method::kNmf;
  throw Error("unknown method: " + s);
}

namespace {

json regime_to_json(const LinkMetricRegime& r) {
  switch (r.kind) {
    case LinkMetricRegime::Kind::kUnweighted:
      return json{{"kind", "unweighted"}};
    case LinkMetricRegime::Kind::kFromFile:
      return json{{"kind", "from-file"}};
    case LinkMetricRegime::Kind::kUniformRandom:
      return json{{"kind", "uniform"}, {"lo", r.lo}, {"hi", r.hi}};
  }
  throw Error("bad regime");
}

LinkMetricRegime regime_from_json(const json& j) {
  std::string kind = j.is_string() ? j.get<std::string>()
                                   : j.at("kind").get<std::string>();
  if (kind == "unweighted") return LinkMetricRegime::unweighted();
  if (kind == "from-file") return LinkMetricRegime::from_file();
  if (kind == "uniform") {
    double lo = j.is_object() ? j.value("lo", 1.0) : 1.0;
    double hi = j.is_object() ? j.value("hi", 10.0) : 10.0;
    return LinkMetricRegime::uniform_random(lo, hi);
  }
  throw Error("unknown link metric regime: " + kind);
}

std::string regime_label(const LinkMetricRegime& r) {
  switch (r.kind) {
    case LinkMetricRegime::Kind::kUnweighted:
      return "UN";
    case LinkMetricRegime::Kind::kFromFile:
      return "Re";
    case LinkMetricRegime::Kind::kUniformRandom:
      return "UD";
  }
  return "?";
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::optional<double> json_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

ModelConfig ExperimentSpec::model_config(int node_count,
                                         std::uint64_t model_seed) const {
  ModelConfig mc;
  mc.node_count = node_count;
  mc.hidden_width =
      hidden_width > 0
          ? hidden_width
          : static_cast<int>(std::ceil(gamma_factor * node_count));
  mc.hidden_layers = hidden_layers;
  mc.epochs = epochs;
  mc.learning_rate = learning_rate;
  mc.batch_size = batch_size;
  mc.normalize_targets = normalize_targets;
  mc.seed = model_seed;
  return mc;
}

std::string ExperimentSpec::cell_json(std::uint64_t seed) const {
  json j;
  j["network"] = {{"name", network.name},
                  {"file", network.file},
                  {"nodes", network.nodes},
                  {"avg_degree", network.avg_degree}};
  j["regime"] = regime_to_json(regime);
  j["semantics"] = to_string(semantics);
  j["strategy"] = to_string(strategy);
  j["sampling"] = to_string(sampling);
  j["ratio"] = ratio;
  j["method"] = to_string(method);
  j["model"] = {{"gamma_factor", gamma_factor},
                {"hidden_width", hidden_width},
                {"hidden_layers", hidden_layers},
                {"epochs", epochs},
                {"learning_rate", learning_rate},
                {"batch_size", batch_size},
                {"normalize_targets", normalize_targets}};
  j["pat"] = {{"alpha", pat.alpha},
              {"beta", pat.beta},
              {"iterations", pat.iterations},
              {"reset_model_each_iteration", pat.reset_model_each_iteration}};
  j["nmf"] = {{"rank", nmf.rank}, {"max_iters", nmf.max_iters}, {"tol", nmf.tol}};
  j["seed"] = seed;
  return j.dump();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write: " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

CellResult load_cached_cell(const std::filesystem::path& cell_dir) {
  std::ifstream in(cell_dir / "report.json");
  json j = json::parse(in);
  CellResult result;
  result.cell_dir = cell_dir;
  result.cached = true;
  result.report.mape = j.at("mape").get<double>();
  result.report.histogram_l1 = j.at("histogram_l1").get<double>();
  const json& cfg = j.at("config");
  result.report.network = cfg.at("network").at("name").get<std::string>();
  result.report.regime = regime_label(regime_from_json(cfg.at("regime")));
  result.report.strategy = cfg.at("strategy").get<std::string>();
  result.report.semantics = cfg.at("semantics").get<std::string>();
  result.report.sampling = cfg.at("sampling").get<std::string>();
  result.report.ratio = cfg.at("ratio").get<double>();
  result.report.method = cfg.at("method").get<std::string>();
  result.report.seed = cfg.at("seed").get<std::uint64_t>();
  for (const json& row : j.value("reconstruction", json::array())) {
    ReconstructionRow r;
    r.m = row.at("m").get<int>();
    r.tau = row.at("tau").get<long long>();
    r.fpr = json_optional(row, "fpr");
    r.fnr = json_optional(row, "fnr");
    result.reconstruction.push_back(r);
  }
  return result;
}

void write_histogram_csv(const std::filesystem::path& path,
                         std::span<const double> predicted,
                         std::span<const double> truth) {
  auto hp = unit_histogram(predicted);
  auto ht = unit_histogram(truth);
  std::ofstream out(path);
  out << "bin,predicted,truth\n";
  auto it_p = hp.begin();
  auto it_t = ht.begin();
  while (it_p != hp.end() || it_t != ht.end()) {
    long long bin;
    double p = 0.0, t = 0.0;
    if (it_t == ht.end() || (it_p != hp.end() && it_p->first < it_t->first)) {
      bin = it_p->first;
    } else if (it_p == hp.end() || it_t->first < it_p->first) {
      bin = it_t->first;
    } else {
      bin = it_p->first;
    }
    if (it_p != hp.end() && it_p->first == bin) p = (it_p++)->second;
    if (it_t != ht.end() && it_t->first == bin) t = (it_t++)->second;
    out << bin << ',' << format_double(p) << ',' << format_double(t) << '\n';
  }
}

void write_loss_csv(const std::filesystem::path& path,
                    std::span<const double> losses) {
  std::ofstream out(path);
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i)
    out << (i + 1) << ',' << format_double(losses[i]) << '\n';
}

bool is_hop_count_task(const ExperimentSpec& spec) {
  return spec.regime.kind == LinkMetricRegime::Kind::kUnweighted &&
         spec.semantics == MetricSemantics::kAdditive;
}

}  // namespace

CellResult run_cell(const ExperimentSpec& spec, std::uint64_t seed) {
  const std::string config_text = spec.cell_json(seed);
  const std::filesystem::path cell_dir =
      spec.out_dir / "cells" / hex64(fnv1a(config_text));

  if (!spec.force && std::filesystem::exists(cell_dir / "report.json"))
    return load_cached_cell(cell_dir);

  std::filesystem::create_directories(cell_dir);
  try {
    const std::uint64_t topo_seed = derive_seed(seed, "topology");
    const std::uint64_t metric_seed = derive_seed(seed, "metrics");
    const std::uint64_t sample_seed = derive_seed(seed, "sampling");
    const std::uint64_t model_seed = derive_seed(seed, "model");
    const std::uint64_t pat_seed = derive_seed(seed, "pat");
    const std::uint64_t nmf_seed = derive_seed(seed, "nmf");

    Topology topo =
        spec.network.file.empty()
            ? generate_topology(spec.network.nodes, spec.network.avg_degree,
                                topo_seed)
            : load_topology(spec.network.file);
    topo = assign_link_metrics(topo, spec.regime, metric_seed);
    save_topology(topo, cell_dir / "topology.txt");

    GroundTruthTable gt = route_all_pairs(topo, spec.strategy, spec.semantics);
    MeasurementSet ms =
        spec.sampling == SamplingMethod::kRandom
            ? sample_random(gt, spec.ratio, sample_seed)
            : sample_monitor_based(gt, spec.ratio, sample_seed);
    ms.save(cell_dir);

    const int n = topo.node_count();
    // Evaluation runs over the held-out pairs; a fully measured cell (the
    // all-pairs memorization check) falls back to the training pairs.
    const bool memorization_cell = ms.heldout().empty();
    const std::vector<MeasuredPair>& eval_set =
        memorization_cell ? ms.measured() : ms.heldout();
    std::vector<std::pair<int, int>> eval_pairs;
    std::vector<double> eval_truth;
    eval_pairs.reserve(eval_set.size());
    for (const MeasuredPair& p : eval_set) {
      eval_pairs.emplace_back(p.u, p.v);
      eval_truth.push_back(p.metric);
    }

    PredictionTable predictions;
    bool with_provenance = false;
    switch (spec.method) {
      case Method::kNeuTomo: {
        ModelConfig mc = spec.model_config(n, model_seed);
        std::vector<TrainingExample> examples;
        examples.reserve(ms.measured().size());
        for (const MeasuredPair& p : ms.measured())
          examples.push_back({p.u, p.v, p.metric});
        TrainResult tr = train(mc, examples);
        write_loss_csv(cell_dir / "loss.csv", tr.epoch_losses);
        save_model(tr.model, cell_dir / "model.ckpt");
        predictions = predict(tr.model, eval_pairs);
        break;
      }
      case Method::kNeuTomoPat: {
        ModelConfig mc = spec.model_config(n, model_seed);
        PatConfig pc = spec.pat;
        pc.seed = pat_seed;
        PatResult pr = pat_train(ms, pc, mc, spec.semantics);
        write_loss_csv(cell_dir / "loss.csv", pr.epoch_losses);
        save_model(pr.model, cell_dir / "model.ckpt");
        predictions = memorization_cell ? predict(pr.model, eval_pairs)
                                        : pr.estimates.to_predictions();
        with_provenance = true;
        break;
      }
      case Method::kNmf: {
        if (memorization_cell)
          throw Error("nmf needs at least one held-out pair to evaluate");
        NmfConfig nc = spec.nmf;
        nc.rank = std::min(nc.rank, n - 1);
        nc.seed = nmf_seed;
        NmfResult nr = nmf_complete(ms.measured(), n, nc);
        predictions = nr.predictions;
        with_provenance = true;
        break;
      }
    }
    predictions.save_csv(cell_dir / "predictions.csv", with_provenance);

    // Align predictions with the evaluation order through the pair index.
    std::vector<double> by_pair(gt.size(),
                                std::numeric_limits<double>::quiet_NaN());
    for (const Prediction& p : predictions.rows())
      by_pair[gt.pair_index(p.u, p.v)] = p.value;
    std::vector<double> heldout_pred;
    heldout_pred.reserve(eval_pairs.size());
    for (const auto& [u, v] : eval_pairs) {
      double value = by_pair[gt.pair_index(u, v)];
      if (std::isnan(value)) throw Error("prediction missing for a held-out pair");
      heldout_pred.push_back(value);
    }

    CellResult result;
    result.cell_dir = cell_dir;
    result.report = evaluate_predictions(heldout_pred, eval_truth);
    result.report.network = spec.network.name;
    result.report.regime = regime_label(spec.regime);
    result.report.strategy = to_string(spec.strategy);
    result.report.semantics = to_string(spec.semantics);
    result.report.sampling = to_string(spec.sampling);
    result.report.ratio = spec.ratio;
    result.report.method = to_string(spec.method);
    result.report.seed = seed;

    write_histogram_csv(cell_dir / "histogram.csv", heldout_pred, eval_truth);

    if (is_hop_count_task(spec)) {
      std::vector<double> mixed(gt.size());
      std::vector<double> truth_hops(gt.size());
      for (std::size_t idx = 0; idx < gt.size(); ++idx) {
        truth_hops[idx] = static_cast<double>(gt.hop_counts()[idx]);
        mixed[idx] = std::isnan(by_pair[idx]) ? gt.metrics()[idx] : by_pair[idx];
      }
      std::ofstream rec_csv(cell_dir / "reconstruction.csv");
      rec_csv << "m,tau,fpr,fnr\n";
      for (int m = 1; m <= 5; ++m) {
        ExtendedAdjacency predicted =
            ExtendedAdjacency::from_pair_values(n, mixed, m);
        ExtendedAdjacency truth =
            ExtendedAdjacency::from_pair_values(n, truth_hops, m);
        predicted.save(cell_dir / ("adjacency_m" + std::to_string(m) + ".txt"));
        ReconstructionScore s = score(predicted, truth);
        result.reconstruction.push_back({m, s.true_nonzeros, s.fpr, s.fnr});
        rec_csv << m << ',' << s.true_nonzeros << ','
                << (s.fpr ? format_double(*s.fpr) : "na") << ','
                << (s.fnr ? format_double(*s.fnr) : "na") << '\n';
      }
    }

    json report;
    report["config"] = json::parse(config_text);
    report["mape"] = result.report.mape;
    report["histogram_l1"] = result.report.histogram_l1;
    report["heldout_pairs"] = ms.heldout().size();
    report["measured_pairs"] = ms.measured().size();
    if (!ms.monitors().empty()) report["monitors"] = ms.monitors();
    if (!result.reconstruction.empty()) {
      json rec = json::array();
      for (const ReconstructionRow& r : result.reconstruction) {
        json row;
        row["m"] = r.m;
        row["tau"] = r.tau;
        row["fpr"] = r.fpr ? json(*r.fpr) : json(nullptr);
        row["fnr"] = r.fnr ? json(*r.fnr) : json(nullptr);
        rec.push_back(row);
      }
      report["reconstruction"] = rec;
    }
    write_text(cell_dir / "report.json", report.dump(2) + "\n");
    return result;
  } catch (const std::exception& e) {
    json failure;
    failure["config"] = json::parse(config_text);
    failure["error"] = e.what();
    write_text(cell_dir / "error.json", failure.dump(2) + "\n");
    throw;
  }
}

GridSpec GridSpec::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grid config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_string(buffer.str());
}

GridSpec GridSpec::from_json_string(const std::string& text) {
  json j = json::parse(text);
  GridSpec grid;
  ExperimentSpec& base = grid.base;

  if (j.contains("networks")) {
    for (const json& nj : j.at("networks")) {
      NetworkSource src;
      src.name = nj.value("name", std::string("synthetic"));
      src.file = nj.value("file", std::string());
      src.nodes = nj.value("nodes", 100);
      src.avg_degree = nj.value("avg_degree", 4.0);
      grid.networks.push_back(src);
    }
  }
  if (j.contains("regimes"))
    for (const json& rj : j.at("regimes"))
      grid.regimes.push_back(regime_from_json(rj));
  if (j.contains("semantics"))
    base.semantics = metric_semantics_from_string(j.at("semantics"));
  if (j.contains("strategies"))
    for (const json& sj : j.at("strategies"))
      grid.strategies.push_back(routing_strategy_from_string(sj));
  if (j.contains("samplings"))
    for (const json& sj : j.at("samplings"))
      grid.samplings.push_back(sampling_method_from_string(sj));
  if (j.contains("ratios"))
    grid.ratios = j.at("ratios").get<std::vector<double>>();
  if (j.contains("methods"))
    for (const json& mj : j.at("methods"))
      grid.methods.push_back(method_from_string(mj));
  if (j.contains("seeds"))
    grid.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();

  if (j.contains("model")) {
    const json& m = j.at("model");
    base.gamma_factor = m.value("gamma_factor", base.gamma_factor);
    base.hidden_width = m.value("hidden_width", base.hidden_width);
    base.hidden_layers = m.value("hidden_layers", base.hidden_layers);
    base.epochs = m.value("epochs", base.epochs);
    base.learning_rate = m.value("learning_rate", base.learning_rate);
    base.batch_size = m.value("batch_size", base.batch_size);
    base.normalize_targets = m.value("normalize_targets", base.normalize_targets);
  }
  if (j.contains("pat")) {
    const json& p = j.at("pat");
    base.pat.alpha = p.value("alpha", base.pat.alpha);
    base.pat.beta = p.value("beta", base.pat.beta);
    base.pat.iterations = p.value("iterations", base.pat.iterations);
    base.pat.reset_model_each_iteration =
        p.value("reset_model_each_iteration", false);
  }
  if (j.contains("nmf")) {
    const json& nj = j.at("nmf");
    base.nmf.rank = nj.value("rank", base.nmf.rank);
    base.nmf.max_iters = nj.value("max_iters", base.nmf.max_iters);
    base.nmf.tol = nj.value("tol", base.nmf.tol);
  }
  if (j.contains("out_dir"))
    base.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("force")) base.force = j.at("force").get<bool>();
  grid.workers = j.value("workers", 1);
  return grid;
}

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

GridResult run_grid(const GridSpec& spec) {
  std::vector<NetworkSource> networks =
      spec.networks.empty() ? std::vector<NetworkSource>{spec.base.network}
                            : spec.networks;
  std::vector<LinkMetricRegime> regimes =
      spec.regimes.empty() ? std::vector<LinkMetricRegime>{spec.base.regime}
                           : spec.regimes;
  std::vector<RoutingStrategy> strategies =
      spec.strategies.empty()
          ? std::vector<RoutingStrategy>{spec.base.strategy}
          : spec.strategies;
  std::vector<SamplingMethod> samplings =
      spec.samplings.empty() ? std::vector<SamplingMethod>{spec.base.sampling}
                             : spec.samplings;
  std::vector<double> ratios =
      spec.ratios.empty() ? std::vector<double>{spec.base.ratio} : spec.ratios;
  std::vector<Method> methods =
      spec.methods.empty() ? std::vector<Method>{spec.base.method}
                           : spec.methods;
  if (spec.seeds.empty()) throw Error("grid needs at least one seed");

  struct Job {
    ExperimentSpec cell;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const NetworkSource& network : networks)
    for (const LinkMetricRegime& regime : regimes)
      for (RoutingStrategy strategy : strategies)
        for (SamplingMethod sampling : samplings)
          for (double ratio : ratios)
            for (Method method : methods)
              for (std::uint64_t seed : spec.seeds) {
                ExperimentSpec cell = spec.base;
                cell.network = network;
                cell.regime = regime;
                cell.strategy = strategy;
                cell.sampling = sampling;
                cell.ratio = ratio;
                cell.method = method;
                jobs.push_back({std::move(cell), seed});
              }
  if (jobs.empty()) throw Error("empty experiment grid");

  struct Row {
    bool ok = false;
    std::string text;
    EvalReport report;
  };
  std::vector<Row> rows(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        CellResult cell = run_cell(jobs[i].cell, jobs[i].seed);
        rows[i] = {true, cell.report.csv_row() + ",ok", cell.report};
      } catch (const std::exception& e) {
        EvalReport stub;
        stub.network = jobs[i].cell.network.name;
        stub.regime = regime_label(jobs[i].cell.regime);
        stub.strategy = to_string(jobs[i].cell.strategy);
        stub.semantics = to_string(jobs[i].cell.semantics);
        stub.sampling = to_string(jobs[i].cell.sampling);
        stub.ratio = jobs[i].cell.ratio;
        stub.method = to_string(jobs[i].cell.method);
        stub.seed = jobs[i].seed;
        std::ostringstream line;
        line << stub.network << ',' << stub.regime << ',' << stub.strategy
             << ',' << stub.semantics << ',' << stub.sampling << ','
             << format_double(stub.ratio) << ',' << stub.method << ','
             << stub.seed << ",na,na,failed";
        rows[i] = {false, line.str(), stub};
        std::cerr << "neutomo: cell failed: " << e.what() << "\n";
      }
    }
  };

  const int workers = std::max(1, spec.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::filesystem::create_directories(spec.base.out_dir);
  GridResult result;
  result.rows_csv = spec.base.out_dir / "grid_rows.csv";
  {
    std::ofstream out(result.rows_csv);
    out << EvalReport::csv_header() << ",status\n";
    for (const Row& row : rows) {
      out << row.text << '\n';
      row.ok ? ++result.completed : ++result.failed;
    }
  }

  // Median-over-seeds summary: rows = ratio x sampling (per network and
  // method), columns = strategy x regime.
  std::vector<std::string> columns;
  for (RoutingStrategy strategy : strategies)
    for (const LinkMetricRegime& regime : regimes) {
      columns.push_back(to_string(strategy) + ":" + regime_label(regime));
    }

  result.summary_csv = spec.base.out_dir / "grid_summary.csv";
  std::ofstream out(result.summary_csv);
  out << "network,method,ratio,sampling";
  for (const std::string& c : columns) out << ',' << c;
  out << '\n';
  for (const NetworkSource& network : networks) {
    for (Method method : methods) {
      for (double ratio : ratios) {
        for (SamplingMethod sampling : samplings) {
          out << network.name << ',' << to_string(method) << ','
              << format_double(ratio) << ',' << to_string(sampling);
          for (RoutingStrategy strategy : strategies) {
            for (const LinkMetricRegime& regime : regimes) {
              std::vector<double> mapes;
              for (const Row& row : rows) {
                if (!row.ok) continue;
                const EvalReport& r = row.report;
                if (r.network == network.name &&
                    r.method == to_string(method) && r.ratio == ratio &&
                    r.sampling == to_string(sampling) &&
                    r.strategy == to_string(strategy) &&
                    r.regime == regime_label(regime)) {
                  mapes.push_back(r.mape);
                }
              }
              out << ',' << (mapes.empty() ? "na" : format_double(median(mapes)));
            }
          }
          out << '\n';
        }
      }
    }
  }
  return result;
}

}  // namespace neutomo
