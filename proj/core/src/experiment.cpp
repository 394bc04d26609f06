#include "chemid/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include <nlohmann/json.hpp>

#include "chemid/random.hpp"
#include "chemid/victim_sim.hpp"

namespace chemid {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

template <typename F>
auto run_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
  out << text;
}

ojson kde_json(const KdeCurve& k) {
  return ojson{{"grid", k.grid}, {"density", k.density}, {"bandwidth", k.bandwidth}};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (rates.empty()) throw std::invalid_argument("at least one perturbation rate is required");
  for (double r : rates) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("perturbation rates must lie in (0, 1)");
  }
  if (replicas == 0) throw std::invalid_argument("replicas must be at least 1");
}

std::string rate_tag(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%gp", rate * 100.0);
  return buf;
}

ExperimentResult run_full_experiment(const ExperimentConfig& cfg) {
  run_stage("config", [&] { cfg.validate(); });
  const fs::path root(cfg.output_dir);
  run_stage("output", [&] {
    fs::create_directories(root / "reports");
    fs::create_directories(root / "victims");
  });

  ExperimentResult result;

  const ChemicalDatabase raw = run_stage(cfg.db_path ? "load" : "generate", [&] {
    ChemicalDatabase db = cfg.db_path ? load_database_file(*cfg.db_path)
                                      : generate_synthetic_database(cfg.synthetic_chemicals, cfg.synthetic_symptoms,
                                                                    cfg.synthetic_density, cfg.seed);
    save_database_file(db, (root / "db.csv").string());
    return db;
  });

  const ChemicalDatabase db = run_stage("dedup", [&] {
    auto [unique, report] = deduplicate(raw);
    ojson clusters = ojson::array();
    for (const auto& c : report.clusters) {
      if (c.merged.size() > 1) clusters.push_back(ojson{{"representative", c.representative}, {"merged", c.merged}});
    }
    write_text(root / "dedup.json", ojson{{"input_count", raw.size()},
                                          {"unique_count", report.unique_count},
                                          {"merged_clusters", std::move(clusters)}}
                                         .dump(1) +
                                         "\n");
    save_database_file(unique, (root / "db_dedup.csv").string());
    return std::move(unique);
  });

  std::vector<std::vector<VictimRecord>> victim_sets;
  run_stage("simulate", [&] {
    ojson densities = ojson::array();
    for (double rate : cfg.rates) {
      PerturbationSpec spec;
      spec.mode = BernoulliToggle{rate};
      spec.replicas_per_chemical = cfg.replicas;
      spec.seed = derive_seed(cfg.seed, "simulate/" + rate_label(rate));
      auto victims = simulate_victims(db, spec);
      write_victims_file(victims, (root / "victims" / ("victims_" + rate_tag(rate) + ".jsonl")).string());
      result.perturbation_kdes.push_back(perturbation_density(victims));
      densities.push_back(ojson{{"rate", rate_label(rate)},
                                {"victims", victims.size()},
                                {"mode", result.perturbation_kdes.back().mode()},
                                {"kde", kde_json(result.perturbation_kdes.back())}});
      victim_sets.push_back(std::move(victims));
    }
    write_text(root / "perturbation_density.json", densities.dump(1) + "\n");
  });

  const TrainedTree tree = run_stage("train-tree", [&] {
    TrainedTree t = train_tree(db, cfg.tree);
    save_tree_file(t, (root / "tree.json").string());
    std::ofstream dot(root / "tree.dot", std::ios::binary);
    write_tree_dot(t, db.symptom_names(), dot);
    result.tree_stats = tree_stats(t);
    write_text(root / "tree_stats.json", ojson{{"depth", result.tree_stats.depth},
                                               {"leaf_count", result.tree_stats.leaf_count},
                                               {"split_count", result.tree_stats.split_count},
                                               {"leaf_depth_histogram", result.tree_stats.leaf_depth_histogram},
                                               {"training_accuracy", t.training_accuracy}}
                                              .dump(1) +
                                              "\n");
    return t;
  });

  const NetworkWeights weights = run_stage("train-ann", [&] {
    AnnTrainConfig ann = cfg.ann;
    ann.seed = derive_seed(cfg.seed, "ann");
    auto [w, report] = train_ann(db, ann);
    save_weights_file(w, (root / "ann.json").string());
    write_text(root / "ann_train.json", report_to_json(report).dump(1) + "\n");
    result.ann_report = std::move(report);
    return std::move(w);
  });

  run_stage("evaluate", [&] {
    using Evaluator = std::function<AccuracyReport(std::span<const VictimRecord>)>;
    const std::vector<Evaluator> evaluators{
        [&](std::span<const VictimRecord> v) { return evaluate_lookup(db, v); },
        [&](std::span<const VictimRecord> v) { return evaluate_tree(tree, v); },
        [&](std::span<const VictimRecord> v) { return evaluate_ann(weights, v); },
    };
    for (const auto& evaluate : evaluators) {
      for (std::size_t k = 0; k < cfg.rates.size(); ++k) {
        AccuracyReport r = evaluate(victim_sets[k]);
        save_report_file(r, (root / "reports" / (r.model_id + "_" + rate_tag(cfg.rates[k]) + ".json")).string());
        result.reports.push_back(std::move(r));
      }
    }
  });

  result.summary = run_stage("report", [&] { return write_comparison(result.reports, (root / "comparison").string()); });
  return result;
}

}  // namespace chemid
