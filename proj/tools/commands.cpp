#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include "chemid/decision_tree.hpp"
#include "chemid/error.hpp"
#include "chemid/evaluation.hpp"
#include "chemid/experiment.hpp"
#include "chemid/lookup_engine.hpp"
#include "chemid/neural_net.hpp"
#include "chemid/random.hpp"
#include "chemid/ssx_matrix.hpp"
#include "chemid/triage.hpp"
#include "chemid/victim_sim.hpp"

namespace chemid::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string db;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string out_or(const Globals& g, const std::string& fallback) { return g.out.empty() ? fallback : g.out; }

const std::string& require_db(const Globals& g) {
  if (g.db.empty()) throw UsageError("--db is required for this command");
  return g.db;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

// Loads a CSV and merges identical profiles, as every model stage expects.
ChemicalDatabase load_unique(const std::string& path) {
  const ChemicalDatabase raw = load_database_file(path);
  auto [unique, report] = deduplicate(raw);
  if (unique.size() != raw.size()) {
    std::cerr << "note: merged " << raw.size() - unique.size() << " chemicals with duplicate profiles\n";
  }
  return std::move(unique);
}

std::vector<VictimRecord> load_victims(const std::string& path, std::size_t width) {
  auto victims = read_victims_file(path);
  if (victims.empty()) throw DataError("victims file '" + path + "' is empty");
  for (std::size_t i = 0; i < victims.size(); ++i) {
    if (victims[i].observed.size() != width) {
      throw DataError("victim has " + std::to_string(victims[i].observed.size()) + " symptoms, model expects " +
                      std::to_string(width), i + 1);
    }
  }
  return victims;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size() || v == 0) throw UsageError("bad hidden size '" + s + "' in --dims");
    return static_cast<std::size_t>(v);
  };
  if (text.find(':') != std::string::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string::npos) throw UsageError("--dims range must be start:stop:step");
    const std::size_t start = number(text.substr(0, a));
    const std::size_t stop = number(text.substr(a + 1, b - a - 1));
    const std::size_t step = number(text.substr(b + 1));
    for (std::size_t h = start; h <= stop; h += step) dims.push_back(h);
  } else {
    std::size_t begin = 0;
    while (begin <= text.size()) {
      const auto comma = text.find(',', begin);
      dims.push_back(number(text.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin)));
      if (comma == std::string::npos) break;
      begin = comma + 1;
    }
  }
  if (dims.empty()) throw UsageError("--dims selects no hidden sizes");
  return dims;
}

void print_report(const AccuracyReport& r) {
  std::printf("%-7s %-4s accuracy %7.3f%%  min %6.2f%%  max %6.2f%%  (%zu/%zu)\n", r.model_id.c_str(),
              r.rate_label.c_str(), 100.0 * r.overall, 100.0 * r.min, 100.0 * r.max, r.n_correct, r.n_total);
}

void print_grid(const ComparisonSummary& s) {
  std::printf("%-8s", "model");
  for (const auto& r : s.rates) std::printf("%10s", r.c_str());
  std::printf("\n");
  for (std::size_t m = 0; m < s.models.size(); ++m) {
    std::printf("%-8s", s.models[m].c_str());
    for (double v : s.grid[m]) {
      if (v < 0.0) {
        std::printf("%10s", "-");
      } else {
        std::printf("%9.3f%%", 100.0 * v);
      }
    }
    std::printf("\n");
  }
}

int finish_training(const AnnTrainReport& r) {
  std::printf("epochs %zu (best %zu)  train error %.3f%%  validation error %.3f%%  test error %.3f%%\n", r.epochs_run,
              r.best_epoch, 100.0 * r.error_rate.train, 100.0 * r.error_rate.validation, 100.0 * r.error_rate.test);
  if (!r.converged) {
    std::cerr << "warning: network did not converge within the epoch budget; weights written anyway\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

struct Action {
  std::function<int()> body;
};

// ---------------------------------------------------------------------------
// Subcommands

void add_gen_db(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("gen-db", "Generate a synthetic chemical x symptom matrix");
  auto chemicals = std::make_shared<std::size_t>(311);
  auto symptoms = std::make_shared<std::size_t>(79);
  auto density = std::make_shared<double>(0.5);
  cmd->add_option("--chemicals", *chemicals, "Number of distinct chemicals")->capture_default_str();
  cmd->add_option("--symptoms", *symptoms, "Number of symptoms")->capture_default_str();
  cmd->add_option("--density", *density, "Probability of a 1 bit")->capture_default_str();
  cmd->callback([&, chemicals, symptoms, density] {
    act.body = [&, chemicals, symptoms, density] {
      const auto db = generate_synthetic_database(*chemicals, *symptoms, *density, g.seed);
      const auto out = out_or(g, "db.csv");
      ensure_parent(out);
      save_database_file(db, out);
      std::printf("wrote %zu chemicals x %zu symptoms (density %.4f) to %s\n", db.size(), db.symptom_count(),
                  bit_density(db), out.c_str());
      return kExitOk;
    };
  });
}

void add_dedup(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("dedup", "Merge chemicals with identical profiles");
  auto clusters = std::make_shared<std::string>();
  cmd->add_option("--clusters", *clusters, "Write merged clusters as JSON");
  cmd->callback([&, clusters] {
    act.body = [&, clusters] {
      const auto raw = load_database_file(require_db(g));
      const auto [unique, report] = deduplicate(raw);
      const auto out = out_or(g, "db_dedup.csv");
      ensure_parent(out);
      save_database_file(unique, out);
      if (!clusters->empty()) {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& c : report.clusters) {
          if (c.merged.size() > 1) j.push_back({{"representative", c.representative}, {"merged", c.merged}});
        }
        write_text(*clusters, j.dump(1) + "\n");
      }
      std::printf("%zu chemicals -> %zu unique profiles, written to %s\n", raw.size(), report.unique_count,
                  out.c_str());
      return kExitOk;
    };
  });
}

void add_simulate(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("simulate", "Simulate perturbed victims from ideal profiles");
  auto rate = std::make_shared<double>(0.05);
  auto fixed = std::make_shared<std::size_t>(0);
  auto replicas = std::make_shared<std::size_t>(100);
  auto density_out = std::make_shared<std::string>();
  auto* rate_opt = cmd->add_option("--rate", *rate, "Per-symptom toggle probability")->capture_default_str();
  auto* fixed_opt = cmd->add_option("--fixed-count", *fixed, "Toggle exactly this many distinct symptoms");
  rate_opt->excludes(fixed_opt);
  cmd->add_option("--replicas", *replicas, "Victims per chemical")->capture_default_str();
  cmd->add_option("--density-out", *density_out, "Write the toggle-count KDE as JSON");
  cmd->callback([&, rate, fixed, replicas, density_out, fixed_opt] {
    const bool use_fixed = fixed_opt->count() > 0;
    act.body = [&, rate, fixed, replicas, density_out, use_fixed] {
      const auto db = load_unique(require_db(g));
      PerturbationSpec spec;
      spec.replicas_per_chemical = *replicas;
      if (use_fixed) {
        spec.mode = FixedCountToggle{*fixed};
        spec.seed = derive_seed(g.seed, "simulate/fixed-" + std::to_string(*fixed));
      } else {
        spec.mode = BernoulliToggle{*rate};
        spec.seed = derive_seed(g.seed, "simulate/" + rate_label(*rate));
      }
      const auto victims = simulate_victims(db, spec);
      const auto out = out_or(g, "victims.jsonl");
      ensure_parent(out);
      write_victims_file(victims, out);
      const auto kde = perturbation_density(victims);
      if (!density_out->empty()) {
        write_text(*density_out, nlohmann::ordered_json{{"victims", victims.size()},
                                                        {"mode", kde.mode()},
                                                        {"grid", kde.grid},
                                                        {"density", kde.density},
                                                        {"bandwidth", kde.bandwidth}}
                                         .dump(1) +
                                     "\n");
      }
      std::printf("wrote %zu victims to %s (toggle-count density mode %.2f)\n", victims.size(), out.c_str(),
                  kde.mode());
      return kExitOk;
    };
  });
}

void add_train_tree(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("train-tree", "Train the deviance-reduction decision tree");
  auto cfg = std::make_shared<TreeTrainConfig>();
  cmd->add_option("--max-splits", cfg->max_splits, "Split budget")->capture_default_str();
  cmd->add_option("--replication", cfg->replication_factor, "Copies of each profile in training")
      ->capture_default_str();
  cmd->callback([&, cfg] {
    act.body = [&, cfg] {
      const auto db = load_unique(require_db(g));
      const auto tree = train_tree(db, *cfg);
      const auto out = out_or(g, "tree.json");
      ensure_parent(out);
      save_tree_file(tree, out);
      std::printf("depth %zu, %zu leaves, %zu splits, training accuracy %.2f%%; written to %s\n", tree.depth,
                  tree.leaf_count, tree.split_count, 100.0 * tree.training_accuracy, out.c_str());
      return kExitOk;
    };
  });
}

void add_dump_tree(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("dump-tree", "Print tree statistics and write a Graphviz rendering");
  auto tree_path = std::make_shared<std::string>("tree.json");
  cmd->add_option("--tree", *tree_path, "Trained tree JSON")->capture_default_str();
  cmd->callback([&, tree_path] {
    act.body = [&, tree_path] {
      const auto tree = load_tree_file(*tree_path);
      std::vector<std::string> names;
      if (!g.db.empty()) names = load_database_file(g.db).symptom_names();
      const auto out = out_or(g, "tree.dot");
      ensure_parent(out);
      std::ofstream dot(out, std::ios::binary);
      if (!dot) throw std::runtime_error("cannot open '" + out + "' for writing");
      write_tree_dot(tree, names, dot);
      const auto s = tree_stats(tree);
      std::cout << nlohmann::ordered_json{{"depth", s.depth},
                                          {"leaf_count", s.leaf_count},
                                          {"split_count", s.split_count},
                                          {"leaf_depth_histogram", s.leaf_depth_histogram}}
                       .dump()
                << "\n";
      return kExitOk;
    };
  });
}

void add_train_ann(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("train-ann", "Train the single-hidden-layer network");
  auto cfg = std::make_shared<AnnTrainConfig>();
  auto report_path = std::make_shared<std::string>();
  cmd->add_option("--hidden", cfg->hidden_dim, "Hidden units")->capture_default_str();
  cmd->add_option("--replicas", cfg->replicas, "Copies of each profile in the pattern set")->capture_default_str();
  cmd->add_option("--max-epochs", cfg->max_epochs, "Epoch budget")->capture_default_str();
  cmd->add_option("--patience", cfg->patience, "Early-stopping patience")->capture_default_str();
  cmd->add_option("--learning-rate", cfg->learning_rate, "Gradient descent step")->capture_default_str();
  cmd->add_option("--features", cfg->feature_count, "Leading symptoms used as inputs (0 = all)")
      ->capture_default_str();
  cmd->add_option("--report", *report_path, "Training report JSON (default: <out>_train.json)");
  cmd->callback([&, cfg, report_path] {
    act.body = [&, cfg, report_path] {
      const auto db = load_unique(require_db(g));
      AnnTrainConfig c = *cfg;
      c.seed = derive_seed(g.seed, "ann");
      const auto [weights, report] = train_ann(db, c);
      const auto out = out_or(g, "ann.json");
      ensure_parent(out);
      save_weights_file(weights, out);
      std::string rp = *report_path;
      if (rp.empty()) rp = (fs::path(out).parent_path() / (fs::path(out).stem().string() + "_train.json")).string();
      write_text(rp, report_to_json(report).dump(1) + "\n");
      std::printf("network %zu-%zu-%zu written to %s\n", weights.input_dim, weights.hidden_dim, weights.output_dim,
                  out.c_str());
      return finish_training(report);
    };
  });
}

struct EvalOptions {
  std::string model;
  std::string victims;
  std::string tree = "tree.json";
  std::string ann = "ann.json";
};

int evaluate_command(const Globals& g, const EvalOptions& o) {
  if (o.victims.empty()) throw UsageError("--victims is required");
  AccuracyReport report;
  if (o.model == "lookup") {
    const auto db = load_unique(require_db(g));
    report = evaluate_lookup(db, load_victims(o.victims, db.symptom_count()));
  } else if (o.model == "tree") {
    const auto tree = load_tree_file(o.tree);
    report = evaluate_tree(tree, load_victims(o.victims, tree.symptom_count));
  } else if (o.model == "ann") {
    const auto w = load_weights_file(o.ann);
    auto victims = read_victims_file(o.victims);
    if (victims.empty()) throw DataError("victims file '" + o.victims + "' is empty");
    for (std::size_t i = 0; i < victims.size(); ++i) {
      if (victims[i].observed.size() < w.input_dim) throw DataError("victim profile narrower than network input", i + 1);
    }
    report = evaluate_ann(w, victims);
  } else {
    throw UsageError("--model must be lookup, tree or ann");
  }
  const auto out = out_or(g, report.model_id + "_report.json");
  ensure_parent(out);
  save_report_file(report, out);
  print_report(report);
  return kExitOk;
}

void add_eval(CLI::App& app, Globals& g, Action& act) {
  auto add = [&](const std::string& name, const std::string& fixed_model, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    auto o = std::make_shared<EvalOptions>();
    o->model = fixed_model;
    if (fixed_model.empty()) {
      cmd->add_option("--model", o->model, "lookup, tree or ann")
          ->required()
          ->check(CLI::IsMember({"lookup", "tree", "ann"}));
    }
    cmd->add_option("--victims", o->victims, "Victims JSONL")->required();
    if (fixed_model.empty() || fixed_model == "tree") {
      cmd->add_option("--tree", o->tree, "Trained tree JSON")->capture_default_str();
    }
    if (fixed_model.empty() || fixed_model == "ann") {
      cmd->add_option("--ann", o->ann, "Trained network JSON")->capture_default_str();
    }
    cmd->callback([&, o] { act.body = [&, o] { return evaluate_command(g, *o); }; });
  };
  add("eval", "", "Score a model on a victim set");
  add("eval-lookup", "lookup", "Score subset lookup on a victim set");
  add("eval-tree", "tree", "Score the decision tree on a victim set");
  add("eval-ann", "ann", "Score the network on a victim set");
}

void add_sweep(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("sweep-hidden", "Victim error rate against hidden-layer size");
  auto dims = std::make_shared<std::string>("10:100:10");
  auto features = std::make_shared<std::size_t>(0);
  auto victims_path = std::make_shared<std::string>();
  auto replicas = std::make_shared<std::size_t>(100);
  auto base = std::make_shared<AnnTrainConfig>();
  cmd->add_option("--dims", *dims, "start:stop:step or comma list")->capture_default_str();
  cmd->add_option("--features", *features, "Leading symptoms used as inputs (0 = all)")->capture_default_str();
  cmd->add_option("--victims", *victims_path, "Victims JSONL (default: simulate 5% victims)");
  cmd->add_option("--replicas", *replicas, "Victims per chemical when simulating")->capture_default_str();
  cmd->add_option("--max-epochs", base->max_epochs, "Epoch budget per network")->capture_default_str();
  cmd->add_option("--learning-rate", base->learning_rate, "Gradient descent step")->capture_default_str();
  cmd->callback([&, dims, features, victims_path, replicas, base] {
    act.body = [&, dims, features, victims_path, replicas, base] {
      const auto sizes = parse_dims(*dims);
      const auto db = load_unique(require_db(g));
      std::vector<VictimRecord> victims;
      if (victims_path->empty()) {
        PerturbationSpec spec;
        spec.mode = BernoulliToggle{0.05};
        spec.replicas_per_chemical = *replicas;
        spec.seed = derive_seed(g.seed, "simulate/" + rate_label(0.05));
        victims = simulate_victims(db, spec);
      } else {
        victims = load_victims(*victims_path, db.symptom_count());
      }
      AnnTrainConfig cfg = *base;
      cfg.seed = derive_seed(g.seed, "ann");
      const auto rows = hidden_sweep(db, victims, sizes, *features, cfg);
      std::string csv = "hidden_dim,victim_error_rate,train_error_rate,epochs_run\n";
      std::printf("%8s %12s %12s %8s\n", "hidden", "victim err", "train err", "epochs");
      for (const auto& r : rows) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%zu\n", r.hidden_dim, r.victim_error_rate, r.train_error_rate,
                      r.epochs_run);
        csv += buf;
        std::printf("%8zu %11.3f%% %11.3f%% %8zu\n", r.hidden_dim, 100.0 * r.victim_error_rate,
                    100.0 * r.train_error_rate, r.epochs_run);
      }
      write_text(out_or(g, "sweep.csv"), csv);
      return kExitOk;
    };
  });
}

void add_report(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("report", "Combine accuracy reports into comparison artifacts");
  auto inputs = std::make_shared<std::vector<std::string>>();
  cmd->add_option("--in", *inputs, "Report JSON files")->required()->expected(1, -1);
  cmd->callback([&, inputs] {
    act.body = [&, inputs] {
      std::vector<AccuracyReport> reports;
      for (const auto& p : *inputs) reports.push_back(load_report_file(p));
      const auto summary = write_comparison(reports, out_or(g, "comparison"));
      print_grid(summary);
      return kExitOk;
    };
  });
}

void add_run(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("run", "Run the whole pipeline and write every artifact");
  auto cfg = std::make_shared<ExperimentConfig>();
  cmd->add_option("--chemicals", cfg->synthetic_chemicals, "Synthetic database size")->capture_default_str();
  cmd->add_option("--symptoms", cfg->synthetic_symptoms, "Synthetic symptom count")->capture_default_str();
  cmd->add_option("--density", cfg->synthetic_density, "Synthetic bit density")->capture_default_str();
  cmd->add_option("--rates", cfg->rates, "Perturbation rates")->capture_default_str()->delimiter(',');
  cmd->add_option("--replicas", cfg->replicas, "Victims per chemical and rate")->capture_default_str();
  cmd->add_option("--max-splits", cfg->tree.max_splits, "Tree split budget")->capture_default_str();
  cmd->add_option("--hidden", cfg->ann.hidden_dim, "Hidden units")->capture_default_str();
  cmd->add_option("--max-epochs", cfg->ann.max_epochs, "Network epoch budget")->capture_default_str();
  cmd->add_option("--learning-rate", cfg->ann.learning_rate, "Network step size")->capture_default_str();
  cmd->add_option("--features", cfg->ann.feature_count, "Network input symptoms (0 = all)")->capture_default_str();
  cmd->callback([&, cfg] {
    act.body = [&, cfg] {
      ExperimentConfig c = *cfg;
      c.seed = g.seed;
      c.output_dir = out_or(g, "out");
      if (!g.db.empty()) c.db_path = g.db;
      try {
        c.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const auto result = run_full_experiment(c);
      std::printf("tree depth %zu, %zu leaves\n", result.tree_stats.depth, result.tree_stats.leaf_count);
      print_grid(result.summary);
      std::printf("artifacts in %s\n", c.output_dir.c_str());
      return finish_training(result.ann_report);
    };
  });
}

void add_serve(CLI::App& app, Globals& g, Action& act) {
  auto* cmd = app.add_subcommand("serve", "Serve the interactive triage HTTP API");
  auto tree_path = std::make_shared<std::string>();
  auto ann_path = std::make_shared<std::string>();
  auto http = std::make_shared<HttpOptions>();
  auto ttl = std::make_shared<long>(3600);
  auto top_k = std::make_shared<std::size_t>(5);
  cmd->add_option("--tree", *tree_path, "Trained tree JSON");
  cmd->add_option("--ann", *ann_path, "Trained network JSON");
  cmd->add_option("--host", http->host, "Listen address")->capture_default_str();
  cmd->add_option("--port", http->port, "Listen port (0 = any free port)")->capture_default_str();
  cmd->add_option("--cors-origin", http->cors_origin, "Allowed browser origin")->capture_default_str();
  cmd->add_option("--ttl", *ttl, "Idle session lifetime in seconds")->capture_default_str();
  cmd->add_option("--top-k", *top_k, "Network candidates per view")->capture_default_str();
  cmd->callback([&, tree_path, ann_path, http, ttl, top_k] {
    act.body = [&, tree_path, ann_path, http, ttl, top_k] {
      ModelSet models;
      models.db = std::make_shared<const ChemicalDatabase>(load_unique(require_db(g)));
      if (!tree_path->empty()) models.tree = std::make_shared<const TrainedTree>(load_tree_file(*tree_path));
      if (!ann_path->empty()) models.ann = std::make_shared<const NetworkWeights>(load_weights_file(*ann_path));
      try {
        models.validate();
      } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
      }
      TriageOptions opts;
      opts.session_ttl = std::chrono::seconds(*ttl);
      opts.top_k = *top_k;
      auto service = std::make_shared<TriageService>(models, opts);
      TriageHttpServer server(service, *http);
      const int port = server.bind();
      std::printf("listening on http://%s:%d\n", http->host.c_str(), port);
      std::fflush(stdout);
      server.serve();
      return kExitOk;
    };
  });
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Chemical identification from signs and symptoms: lookup, decision tree and neural network"};
  app.name("chemid");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Key/value config file (TOML or INI); command-line flags override it");

  Globals g;
  app.add_option("--seed", g.seed, "Root seed for all randomness")->capture_default_str();
  app.add_option("--out", g.out, "Output file or directory (command-specific default)");
  app.add_option("--db", g.db, "Chemical x symptom CSV");

  Action act;
  add_gen_db(app, g, act);
  add_dedup(app, g, act);
  add_simulate(app, g, act);
  add_train_tree(app, g, act);
  add_dump_tree(app, g, act);
  add_train_ann(app, g, act);
  add_eval(app, g, act);
  add_sweep(app, g, act);
  add_report(app, g, act);
  add_run(app, g, act);
  add_serve(app, g, act);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return act.body ? act.body() : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace chemid::cli
