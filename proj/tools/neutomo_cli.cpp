// Command-line driver for the tomography toolkit: composable pipeline steps
// (generate/route/sample/train/pat/predict/nmf/reconstruct/evaluate) plus a
// seeded, resumable grid runner.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "neutomo/error.hpp"
#include "neutomo/experiment.hpp"
#include "neutomo/format.hpp"
#include "neutomo/metrics.hpp"
#include "neutomo/model.hpp"
#include "neutomo/nmf.hpp"
#include "neutomo/pat.hpp"
#include "neutomo/reconstruct.hpp"
#include "neutomo/routing.hpp"
#include "neutomo/sampling.hpp"
#include "neutomo/topology.hpp"

namespace {

using namespace neutomo;

LinkMetricRegime regime_from_flags(const std::string& kind, double lo, double hi) {
  if (kind == "unweighted") return LinkMetricRegime::unweighted();
  if (kind == "from-file") return LinkMetricRegime::from_file();
  if (kind == "uniform") return LinkMetricRegime::uniform_random(lo, hi);
  throw Error("unknown regime: " + kind);
}

std::vector<TrainingExample> to_examples(const std::vector<MeasuredPair>& pairs) {
  std::vector<TrainingExample> examples;
  examples.reserve(pairs.size());
  for (const MeasuredPair& p : pairs) examples.push_back({p.u, p.v, p.metric});
  return examples;
}

ModelConfig model_config_from_flags(int nodes, int gamma, double gamma_factor,
                                    int layers, int epochs, double lr,
                                    int batch, bool normalize,
                                    std::uint64_t seed) {
  ModelConfig mc;
  mc.node_count = nodes;
  mc.hidden_width = gamma > 0
                        ? gamma
                        : static_cast<int>(std::ceil(gamma_factor * nodes));
  mc.hidden_layers = layers;
  mc.epochs = epochs;
  mc.learning_rate = lr;
  mc.batch_size = batch;
  mc.normalize_targets = normalize;
  mc.seed = seed;
  return mc;
}

int max_node(const std::vector<MeasuredPair>& pairs) {
  int n = -1;
  for (const MeasuredPair& p : pairs) n = std::max({n, p.u, p.v});
  return n + 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NeuTomography-style network tomography toolkit"};
  app.require_subcommand(1);

  // ---- generate ----------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Generate a connected random topology");
  int gen_nodes = 100;
  double gen_degree = 4.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "topology.txt";
  std::string gen_regime = "unweighted";
  double gen_lo = 1.0, gen_hi = 10.0;
  std::uint64_t gen_metric_seed = 1;
  gen->add_option("--nodes,-n", gen_nodes, "Node count")->check(CLI::PositiveNumber);
  gen->add_option("--avg-degree", gen_degree, "Target average degree");
  gen->add_option("--seed", gen_seed, "Topology seed");
  gen->add_option("--regime", gen_regime, "Link metric regime")
      ->check(CLI::IsMember({"unweighted", "uniform"}));
  gen->add_option("--lo", gen_lo, "Uniform metric lower bound");
  gen->add_option("--hi", gen_hi, "Uniform metric upper bound");
  gen->add_option("--metric-seed", gen_metric_seed, "Metric assignment seed");
  gen->add_option("--out,-o", gen_out, "Output edge-list file");

  // ---- route --------------------------------------------------------------
  auto* route = app.add_subcommand("route", "Compute all-pairs ground-truth metrics");
  std::string route_topo, route_out = "ground_truth.csv";
  std::string route_strategy = "bpr", route_semantics = "additive";
  route->add_option("--topo", route_topo, "Edge-list file")->required();
  route->add_option("--strategy", route_strategy, "mhr|bpr")
      ->check(CLI::IsMember({"mhr", "bpr"}));
  route->add_option("--semantics", route_semantics, "additive|congestion")
      ->check(CLI::IsMember({"additive", "congestion"}));
  route->add_option("--out,-o", route_out, "Output CSV");

  // ---- sample ---------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "Sample the measured pair set S");
  std::string sample_truth, sample_out = ".";
  std::string sample_method = "random";
  double sample_ratio = 0.3;
  std::uint64_t sample_seed = 1;
  sample->add_option("--truth", sample_truth, "Ground-truth CSV from `route`")->required();
  sample->add_option("--method", sample_method, "random|monitor")
      ->check(CLI::IsMember({"random", "monitor"}));
  sample->add_option("--ratio", sample_ratio, "|S| / |T|");
  sample->add_option("--seed", sample_seed, "Sampling seed");
  sample->add_option("--out,-o", sample_out, "Output directory");

  // ---- train ----------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Train the tomography model on measured pairs");
  std::string train_measured, train_out = "model.ckpt", train_loss_out;
  int train_nodes = 0, train_gamma = 0, train_layers = 2, train_epochs = 1000,
      train_batch = 64;
  double train_gamma_factor = 2.5, train_lr = 1.5e-3;
  bool train_raw = false;
  std::uint64_t train_seed = 1;
  train_cmd->add_option("--measured", train_measured, "measured.csv")->required();
  train_cmd->add_option("--nodes,-n", train_nodes, "Node count (defaults to max id + 1)");
  train_cmd->add_option("--gamma", train_gamma, "Hidden width override");
  train_cmd->add_option("--gamma-factor", train_gamma_factor, "Hidden width = ceil(factor*n)");
  train_cmd->add_option("--layers,-k", train_layers, "Hidden layer count");
  train_cmd->add_option("--epochs", train_epochs, "Training epochs");
  train_cmd->add_option("--lr", train_lr, "Learning rate");
  train_cmd->add_option("--batch", train_batch, "Mini-batch size (0 = full batch)");
  train_cmd->add_flag("--raw-targets", train_raw, "Train on raw metrics instead of max-normalized ones");
  train_cmd->add_option("--seed", train_seed, "Model seed");
  train_cmd->add_option("--out,-o", train_out, "Checkpoint path");
  train_cmd->add_option("--loss-curve", train_loss_out, "Optional per-epoch loss CSV");

  // ---- pat ------------------------------------------------------------
  auto* pat_cmd = app.add_subcommand("pat", "Path Augmented Tomography over measured pairs");
  std::string pat_measured, pat_out = "estimates.csv", pat_model_out;
  std::string pat_semantics = "additive";
  int pat_nodes = 0, pat_gamma = 0, pat_layers = 2, pat_epochs = 1000,
      pat_batch = 64, pat_iterations = 6;
  double pat_gamma_factor = 2.5, pat_lr = 1.5e-3, pat_alpha = 0.15, pat_beta = 0.6;
  bool pat_raw = false, pat_reset = false;
  std::uint64_t pat_seed = 1;
  pat_cmd->add_option("--measured", pat_measured, "measured.csv")->required();
  pat_cmd->add_option("--nodes,-n", pat_nodes, "Node count (defaults to max id + 1)");
  pat_cmd->add_option("--semantics", pat_semantics, "additive|congestion")
      ->check(CLI::IsMember({"additive", "congestion"}));
  pat_cmd->add_option("--alpha", pat_alpha, "Augmented fraction of unmeasured pairs");
  pat_cmd->add_option("--beta", pat_beta, "Soft-update weight");
  pat_cmd->add_option("--iterations", pat_iterations, "PAT iterations");
  pat_cmd->add_flag("--reset", pat_reset, "Re-initialize the model each iteration");
  pat_cmd->add_option("--gamma", pat_gamma, "Hidden width override");
  pat_cmd->add_option("--gamma-factor", pat_gamma_factor, "Hidden width = ceil(factor*n)");
  pat_cmd->add_option("--layers,-k", pat_layers, "Hidden layer count");
  pat_cmd->add_option("--epochs", pat_epochs, "Total epoch budget");
  pat_cmd->add_option("--lr", pat_lr, "Learning rate");
  pat_cmd->add_option("--batch", pat_batch, "Mini-batch size");
  pat_cmd->add_flag("--raw-targets", pat_raw, "Train on raw metrics instead of max-normalized ones");
  pat_cmd->add_option("--seed", pat_seed, "Seed (model and augmentation streams)");
  pat_cmd->add_option("--out,-o", pat_out, "Estimates CSV (with provenance)");
  pat_cmd->add_option("--model-out", pat_model_out, "Optional checkpoint path");

  // ---- predict ----------------------------------------------------------
  auto* predict_cmd = app.add_subcommand("predict", "Predict metrics for listed pairs");
  std::string predict_model, predict_pairs, predict_out = "predictions.csv";
  predict_cmd->add_option("--model", predict_model, "Checkpoint from `train`")->required();
  predict_cmd->add_option("--pairs", predict_pairs,
                          "CSV whose first two columns are u,v (e.g. heldout.csv)")
      ->required();
  predict_cmd->add_option("--out,-o", predict_out, "Output CSV");

  // ---- nmf ------------------------------------------------------------
  auto* nmf_cmd = app.add_subcommand("nmf", "Masked NMF baseline completion");
  std::string nmf_measured, nmf_out = "predictions.csv";
  int nmf_nodes = 0, nmf_rank = 16, nmf_iters = 2000;
  double nmf_tol = 1e-6;
  std::uint64_t nmf_seed = 1;
  nmf_cmd->add_option("--measured", nmf_measured, "measured.csv")->required();
  nmf_cmd->add_option("--nodes,-n", nmf_nodes, "Node count (defaults to max id + 1)");
  nmf_cmd->add_option("--rank", nmf_rank, "Factorization rank");
  nmf_cmd->add_option("--max-iters", nmf_iters, "Iteration budget");
  nmf_cmd->add_option("--tol", nmf_tol, "Relative improvement stop threshold");
  nmf_cmd->add_option("--seed", nmf_seed, "Init seed");
  nmf_cmd->add_option("--out,-o", nmf_out, "Output CSV");

  // ---- reconstruct ------------------------------------------------------
  auto* rec_cmd = app.add_subcommand("reconstruct", "Build m-extended adjacency matrices");
  std::vector<std::string> rec_values;
  std::string rec_truth, rec_prefix = "adjacency";
  int rec_nodes = 0;
  std::vector<int> rec_ms{1, 2, 3, 4, 5};
  rec_cmd->add_option("--values", rec_values,
                      "CSV of per-pair hop values; may repeat to merge, e.g. "
                      "--values measured.csv --values predictions.csv")
      ->required();
  rec_cmd->add_option("--nodes,-n", rec_nodes, "Node count (defaults to max id + 1)");
  rec_cmd->add_option("--m", rec_ms, "Hop distances to reconstruct");
  rec_cmd->add_option("--truth", rec_truth,
                      "Optional ground-truth CSV from `route`; enables scoring");
  rec_cmd->add_option("--out-prefix", rec_prefix, "Adjacency file prefix");

  // ---- evaluate --------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "MAPE + distribution distance of predictions");
  std::string eval_pred, eval_truth, eval_out;
  eval_cmd->add_option("--pred", eval_pred, "predictions.csv")->required();
  eval_cmd->add_option("--truth", eval_truth, "heldout.csv with true metrics")->required();
  eval_cmd->add_option("--out,-o", eval_out, "Optional report JSON path");

  // ---- grid --------------------------------------------------------------
  auto* grid_cmd = app.add_subcommand("grid", "Run an experiment grid from a JSON config");
  std::string grid_config, grid_out;
  int grid_workers = 0;
  bool grid_force = false;
  grid_cmd->add_option("--config", grid_config, "Grid JSON")->required();
  grid_cmd->add_option("--out,-o", grid_out, "Output directory override")
      ->envname("NEUTOMO_OUT_DIR");
  grid_cmd->add_option("--workers", grid_workers, "Concurrent cells")
      ->envname("NEUTOMO_WORKERS");
  grid_cmd->add_flag("--force", grid_force, "Recompute cached cells");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Topology t = generate_topology(gen_nodes, gen_degree, gen_seed);
      if (gen_regime != "unweighted")
        t = assign_link_metrics(t, regime_from_flags(gen_regime, gen_lo, gen_hi),
                                gen_metric_seed);
      save_topology(t, gen_out);
      std::cout << "wrote " << gen_out << " (" << t.node_count() << " nodes, "
                << t.edge_count() << " edges)\n";
    } else if (*route) {
      Topology t = load_topology(route_topo);
      GroundTruthTable gt =
          route_all_pairs(t, routing_strategy_from_string(route_strategy),
                          metric_semantics_from_string(route_semantics));
      gt.save_csv(route_out);
      std::cout << "wrote " << route_out << " (" << gt.size() << " pairs)\n";
    } else if (*sample) {
      GroundTruthTable gt = GroundTruthTable::load_csv(sample_truth);
      MeasurementSet ms =
          sample_method == "random"
              ? sample_random(gt, sample_ratio, sample_seed)
              : sample_monitor_based(gt, sample_ratio, sample_seed);
      ms.save(sample_out);
      std::cout << "wrote " << sample_out << "/measured.csv (" << ms.measured().size()
                << " pairs) and heldout.csv (" << ms.heldout().size() << " pairs)";
      if (!ms.monitors().empty())
        std::cout << "; " << ms.monitors().size() << " monitors";
      std::cout << "\n";
    } else if (*train_cmd) {
      std::vector<MeasuredPair> measured = load_pairs_csv(train_measured);
      const int n = train_nodes > 0 ? train_nodes : max_node(measured);
      ModelConfig mc = model_config_from_flags(
          n, train_gamma, train_gamma_factor, train_layers, train_epochs,
          train_lr, train_batch, !train_raw, train_seed);
      TrainResult tr = train(mc, to_examples(measured));
      save_model(tr.model, train_out);
      if (!train_loss_out.empty()) {
        std::ofstream out(train_loss_out);
        out << "epoch,loss\n";
        for (std::size_t i = 0; i < tr.epoch_losses.size(); ++i)
          out << (i + 1) << ',' << format_double(tr.epoch_losses[i]) << '\n';
      }
      std::cout << "wrote " << train_out << " (final training loss "
                << format_double(tr.epoch_losses.back()) << ")\n";
    } else if (*pat_cmd) {
      std::vector<MeasuredPair> measured = load_pairs_csv(pat_measured);
      const int n = pat_nodes > 0 ? pat_nodes : max_node(measured);
      // Build the full measurement set: held-out pairs are the complement.
      GroundTruthTable index(n);
      std::vector<char> is_measured(index.size(), 0);
      for (const MeasuredPair& p : measured)
        is_measured[index.pair_index(p.u, p.v)] = 1;
      std::vector<MeasuredPair> heldout;
      for (std::size_t idx = 0; idx < index.size(); ++idx) {
        if (is_measured[idx]) continue;
        auto [u, v] = index.pair_at(idx);
        heldout.push_back({u, v, 0.0});
      }
      MeasurementSet ms(n, SamplingMethod::kRandom, 0.0, measured, heldout, {});
      ModelConfig mc = model_config_from_flags(
          n, pat_gamma, pat_gamma_factor, pat_layers, pat_epochs, pat_lr,
          pat_batch, !pat_raw, pat_seed);
      PatConfig pc;
      pc.alpha = pat_alpha;
      pc.beta = pat_beta;
      pc.iterations = pat_iterations;
      pc.reset_model_each_iteration = pat_reset;
      pc.seed = pat_seed;
      PatResult pr = pat_train(ms, pc, mc, metric_semantics_from_string(pat_semantics));
      pr.estimates.to_predictions().save_csv(pat_out, /*with_provenance=*/true);
      if (!pat_model_out.empty()) save_model(pr.model, pat_model_out);
      std::cout << "wrote " << pat_out << " (" << pr.estimates.size()
                << " estimates)\n";
    } else if (*predict_cmd) {
      TomographyModel model = load_model(predict_model);
      std::vector<MeasuredPair> listed = load_pairs_csv(predict_pairs);
      std::vector<std::pair<int, int>> pairs;
      pairs.reserve(listed.size());
      for (const MeasuredPair& p : listed) pairs.emplace_back(p.u, p.v);
      predict(model, pairs).save_csv(predict_out);
      std::cout << "wrote " << predict_out << " (" << pairs.size() << " pairs)\n";
    } else if (*nmf_cmd) {
      std::vector<MeasuredPair> measured = load_pairs_csv(nmf_measured);
      const int n = nmf_nodes > 0 ? nmf_nodes : max_node(measured);
      NmfConfig nc;
      nc.rank = nmf_rank;
      nc.max_iters = nmf_iters;
      nc.tol = nmf_tol;
      nc.seed = nmf_seed;
      NmfResult res = nmf_complete(measured, n, nc);
      res.predictions.save_csv(nmf_out, /*with_provenance=*/true);
      std::cout << "wrote " << nmf_out << " (" << res.predictions.size()
                << " pairs, " << res.iterations << " iterations, objective "
                << format_double(res.objective.back()) << ")\n";
    } else if (*rec_cmd) {
      // Accept prediction CSVs ("u,v,predicted") and measurement CSVs
      // ("u,v,metric") alike; later files win on duplicate pairs.
      std::vector<MeasuredPair> merged;
      for (const std::string& file : rec_values) {
        std::ifstream sniff(file);
        std::string header;
        std::getline(sniff, header);
        sniff.close();
        if (header.rfind("u,v,predicted", 0) == 0) {
          for (const Prediction& p : PredictionTable::load_csv(file).rows())
            merged.push_back({p.u, p.v, p.value});
        } else {
          for (const MeasuredPair& p : load_pairs_csv(file)) merged.push_back(p);
        }
      }
      int n = rec_nodes;
      if (n <= 0) {
        for (const MeasuredPair& p : merged) n = std::max({n, p.u + 1, p.v + 1});
      }
      GroundTruthTable index(n);
      std::vector<double> pair_values(index.size(), 0.0);
      for (const MeasuredPair& p : merged)
        pair_values[index.pair_index(p.u, p.v)] = p.metric;
      std::optional<GroundTruthTable> truth;
      if (!rec_truth.empty()) truth = GroundTruthTable::load_csv(rec_truth);
      for (int m : rec_ms) {
        ExtendedAdjacency a = ExtendedAdjacency::from_pair_values(n, pair_values, m);
        std::string out = rec_prefix + "_m" + std::to_string(m) + ".txt";
        a.save(out);
        std::cout << "wrote " << out << " (" << a.nonzero_pairs() << " pairs)";
        if (truth) {
          std::vector<double> hops(truth->size());
          for (std::size_t i = 0; i < hops.size(); ++i)
            hops[i] = static_cast<double>(truth->hop_counts()[i]);
          ExtendedAdjacency at = ExtendedAdjacency::from_pair_values(n, hops, m);
          ReconstructionScore s = score(a, at);
          std::cout << " fpr=" << (s.fpr ? format_double(*s.fpr) : "na")
                    << " fnr=" << (s.fnr ? format_double(*s.fnr) : "na");
        }
        std::cout << "\n";
      }
    } else if (*eval_cmd) {
      PredictionTable pred = PredictionTable::load_csv(eval_pred);
      std::vector<MeasuredPair> truth = load_pairs_csv(eval_truth);
      int n = 0;
      for (const MeasuredPair& p : truth) n = std::max({n, p.u + 1, p.v + 1});
      for (const Prediction& p : pred.rows()) n = std::max({n, p.u + 1, p.v + 1});
      GroundTruthTable index(n);
      std::vector<double> by_pair(index.size(),
                                  std::numeric_limits<double>::quiet_NaN());
      for (const Prediction& p : pred.rows())
        by_pair[index.pair_index(p.u, p.v)] = p.value;
      std::vector<double> predicted, truths;
      for (const MeasuredPair& p : truth) {
        double value = by_pair[index.pair_index(p.u, p.v)];
        if (std::isnan(value))
          throw Error("prediction missing for pair " + std::to_string(p.u) + "," +
                      std::to_string(p.v));
        predicted.push_back(value);
        truths.push_back(p.metric);
      }
      EvalReport report = evaluate_predictions(predicted, truths);
      nlohmann::json j;
      j["pairs"] = truths.size();
      j["mape"] = report.mape;
      j["histogram_l1"] = report.histogram_l1;
      std::string text = j.dump(2) + "\n";
      if (!eval_out.empty()) {
        std::ofstream out(eval_out);
        out << text;
      }
      std::cout << text;
    } else if (*grid_cmd) {
      GridSpec grid = GridSpec::from_json_file(grid_config);
      if (!grid_out.empty()) grid.base.out_dir = grid_out;
      if (grid_workers > 0) grid.workers = grid_workers;
      if (grid_force) grid.base.force = true;
      GridResult result = run_grid(grid);
      std::cout << "wrote " << result.rows_csv.string() << " and "
                << result.summary_csv.string() << " (" << result.completed
                << " ok, " << result.failed << " failed)\n";
      if (result.failed > 0) return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json failure;
    failure["error"] = e.what();
    std::cerr << failure.dump() << "\n";
    return 1;
  }
}
