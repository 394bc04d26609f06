#include "chemid/neural_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "chemid/error.hpp"
#include "chemid/random.hpp"

namespace chemid {

namespace {

using json = nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Activations {
  MatrixXd hidden;  // N x H, tanh outputs
  MatrixXd logits;  // N x C
};

Activations activate(const NetworkWeights& w, const MatrixXd& x) {
  Activations a;
  a.hidden = ((x * w.w1.transpose()).rowwise() + w.b1.transpose()).array().tanh().matrix();
  a.logits = (a.hidden * w.w2.transpose()).rowwise() + w.b2.transpose();
  return a;
}

// Row-wise log-softmax, stable against large logits.
MatrixXd log_softmax(const MatrixXd& logits) {
  const VectorXd row_max = logits.rowwise().maxCoeff();
  MatrixXd shifted = logits.colwise() - row_max;
  const VectorXd lse = shifted.array().exp().rowwise().sum().log().matrix();
  shifted.colwise() -= lse;
  return shifted;
}

double mean_cross_entropy(const MatrixXd& log_p, const MatrixXd& targets) {
  // 0 * log 0 terms vanish because targets are exactly zero there.
  return -(targets.array() * log_p.array()).sum() / static_cast<double>(log_p.rows());
}

std::size_t count_errors(const MatrixXd& logits, const std::vector<std::size_t>& labels) {
  std::size_t errors = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg;
    logits.row(i).maxCoeff(&arg);
    if (static_cast<std::size_t>(arg) != labels[static_cast<std::size_t>(i)]) ++errors;
  }
  return errors;
}

struct PatternSet {
  MatrixXd inputs;
  MatrixXd targets;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
};

PatternSet gather(const MatrixXd& all_inputs, const std::vector<std::size_t>& all_labels, std::size_t n_classes,
                  std::span<const std::size_t> rows) {
  PatternSet s;
  s.inputs.resize(static_cast<Eigen::Index>(rows.size()), all_inputs.cols());
  s.targets = MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_classes));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    s.inputs.row(static_cast<Eigen::Index>(i)) = all_inputs.row(r);
    s.labels.push_back(all_labels[rows[i]]);
    s.targets(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(all_labels[rows[i]])) = 1.0;
  }
  return s;
}

struct SplitEval {
  double mean_ce = 0.0;
  double total_ce = 0.0;
  double error_rate = 0.0;
};

SplitEval evaluate_split(const NetworkWeights& w, const PatternSet& s) {
  SplitEval e;
  if (s.size() == 0) return e;
  const Activations a = activate(w, s.inputs);
  e.mean_ce = mean_cross_entropy(log_softmax(a.logits), s.targets);
  e.total_ce = e.mean_ce * static_cast<double>(s.size());
  e.error_rate = static_cast<double>(count_errors(a.logits, s.labels)) / static_cast<double>(s.size());
  return e;
}

double* parameter_at(NetworkWeights& w, std::size_t k) {
  const auto n1 = static_cast<std::size_t>(w.w1.size());
  const auto n2 = n1 + static_cast<std::size_t>(w.b1.size());
  const auto n3 = n2 + static_cast<std::size_t>(w.w2.size());
  if (k < n1) return w.w1.data() + k;
  if (k < n2) return w.b1.data() + (k - n1);
  if (k < n3) return w.w2.data() + (k - n2);
  return w.b2.data() + (k - n3);
}

double gradient_at(const Gradients& g, std::size_t k) {
  const auto n1 = static_cast<std::size_t>(g.w1.size());
  const auto n2 = n1 + static_cast<std::size_t>(g.b1.size());
  const auto n3 = n2 + static_cast<std::size_t>(g.w2.size());
  if (k < n1) return g.w1.data()[k];
  if (k < n2) return g.b1.data()[k - n1];
  if (k < n3) return g.w2.data()[k - n2];
  return g.b2.data()[k - n3];
}

}  // namespace

// ---------------------------------------------------------------------------
// NetworkWeights

NetworkWeights NetworkWeights::zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim) {
  NetworkWeights w;
  w.input_dim = input_dim;
  w.hidden_dim = hidden_dim;
  w.output_dim = output_dim;
  w.w1 = MatrixXd::Zero(static_cast<Eigen::Index>(hidden_dim), static_cast<Eigen::Index>(input_dim));
  w.b1 = VectorXd::Zero(static_cast<Eigen::Index>(hidden_dim));
  w.w2 = MatrixXd::Zero(static_cast<Eigen::Index>(output_dim), static_cast<Eigen::Index>(hidden_dim));
  w.b2 = VectorXd::Zero(static_cast<Eigen::Index>(output_dim));
  for (std::size_t c = 0; c < output_dim; ++c) w.classes.push_back("class_" + std::to_string(c));
  return w;
}

NetworkWeights NetworkWeights::random(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                                      std::uint64_t seed) {
  NetworkWeights w = zeros(input_dim, hidden_dim, output_dim);
  Rng rng(seed);
  const double a1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(input_dim, 1)));
  const double a2 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(hidden_dim, 1)));
  for (Eigen::Index i = 0; i < w.w1.size(); ++i) w.w1.data()[i] = (2.0 * rng.uniform() - 1.0) * a1;
  for (Eigen::Index i = 0; i < w.w2.size(); ++i) w.w2.data()[i] = (2.0 * rng.uniform() - 1.0) * a2;
  return w;
}

std::size_t NetworkWeights::parameter_count() const noexcept {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
}

void NetworkWeights::validate() const {
  const auto h = static_cast<Eigen::Index>(hidden_dim);
  const auto in = static_cast<Eigen::Index>(input_dim);
  const auto out = static_cast<Eigen::Index>(output_dim);
  if (w1.rows() != h || w1.cols() != in || b1.size() != h || w2.rows() != out || w2.cols() != h ||
      b2.size() != out) {
    throw DataError("network weight dimensions are inconsistent");
  }
  if (classes.size() != output_dim) throw DataError("network class list does not match output_dim");
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite()) {
    throw DataError("network weights contain non-finite values");
  }
}

// ---------------------------------------------------------------------------
// Forward and backward passes

MatrixXd encode_inputs(std::span<const SymptomProfile> profiles, std::size_t input_dim) {
  MatrixXd x(static_cast<Eigen::Index>(profiles.size()), static_cast<Eigen::Index>(input_dim));
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].size() < input_dim) {
      throw std::invalid_argument("profile has " + std::to_string(profiles[i].size()) +
                                  " symptoms, network needs " + std::to_string(input_dim));
    }
    for (std::size_t f = 0; f < input_dim; ++f) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = profiles[i].test(f) ? 1.0 : 0.0;
    }
  }
  return x;
}

MatrixXd forward(const NetworkWeights& w, const MatrixXd& inputs) {
  return log_softmax(activate(w, inputs).logits).array().exp().matrix();
}

double cross_entropy(const NetworkWeights& w, const MatrixXd& inputs, const MatrixXd& targets) {
  return mean_cross_entropy(log_softmax(activate(w, inputs).logits), targets);
}

Gradients compute_gradients(const NetworkWeights& w, const MatrixXd& inputs, const MatrixXd& targets) {
  const Activations a = activate(w, inputs);
  const MatrixXd log_p = log_softmax(a.logits);
  const auto n = static_cast<double>(inputs.rows());

  Gradients g;
  g.loss = mean_cross_entropy(log_p, targets);
  // d(loss)/d(logits) = (softmax - target) / N for targets whose rows sum to 1.
  const MatrixXd d_logits = (log_p.array().exp().matrix() - targets) / n;
  g.w2 = d_logits.transpose() * a.hidden;
  g.b2 = d_logits.colwise().sum().transpose();
  const MatrixXd d_pre =
      ((d_logits * w.w2).array() * (1.0 - a.hidden.array().square())).matrix();
  g.w1 = d_pre.transpose() * inputs;
  g.b1 = d_pre.colwise().sum().transpose();
  return g;
}

double gradient_check(const NetworkWeights& w, const VectorXd& input, const VectorXd& target, std::uint64_t seed,
                      std::size_t samples) {
  const MatrixXd x = input.transpose();
  const MatrixXd t = target.transpose();
  const Gradients g = compute_gradients(w, x, t);
  NetworkWeights probe = w;
  const std::size_t total = w.parameter_count();
  Rng rng(derive_seed(seed, "gradient-check"));
  constexpr double kStep = 1e-5;

  double worst = 0.0;
  const std::size_t n = std::min(samples, total);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t k = n == total ? s : static_cast<std::size_t>(rng.below(total));
    double* p = parameter_at(probe, k);
    const double saved = *p;
    *p = saved + kStep;
    const double up = cross_entropy(probe, x, t);
    *p = saved - kStep;
    const double down = cross_entropy(probe, x, t);
    *p = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double analytic = gradient_at(g, k);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Training

std::pair<NetworkWeights, AnnTrainReport> train_ann(const ChemicalDatabase& db, const AnnTrainConfig& cfg) {
  if (db.empty()) throw std::invalid_argument("cannot train a network on an empty database");
  const std::size_t features = cfg.feature_count == 0 ? db.symptom_count() : cfg.feature_count;
  if (features > db.symptom_count()) throw std::invalid_argument("feature_count exceeds symptom count");
  if (cfg.hidden_dim == 0 || cfg.replicas == 0) throw std::invalid_argument("hidden_dim and replicas must be positive");
  const double fraction_sum = cfg.train_fraction + cfg.validation_fraction + cfg.test_fraction;
  if (std::abs(fraction_sum - 1.0) > 1e-9 || cfg.train_fraction <= 0.0 || cfg.validation_fraction < 0.0 ||
      cfg.test_fraction < 0.0) {
    throw std::invalid_argument("split fractions must be non-negative, with positive train, and sum to 1");
  }
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");

  const std::size_t n_classes = db.size();
  std::vector<SymptomProfile> profiles;
  std::vector<std::size_t> labels;
  for (std::size_t rep = 0; rep < cfg.replicas; ++rep) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      profiles.push_back(db[c].profile);
      labels.push_back(c);
    }
  }
  const MatrixXd all_inputs = encode_inputs(profiles, features);

  const std::size_t total = labels.size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(derive_seed(cfg.seed, "ann-split"));
  for (std::size_t i = total; i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(split_rng.below(i))]);
  }
  const auto n_train = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.train_fraction * total)));
  const auto n_val = std::min(total - n_train, static_cast<std::size_t>(std::llround(cfg.validation_fraction * total)));
  const std::span<const std::size_t> rows(order);
  const PatternSet train = gather(all_inputs, labels, n_classes, rows.subspan(0, n_train));
  const PatternSet val = gather(all_inputs, labels, n_classes, rows.subspan(n_train, n_val));
  const PatternSet test = gather(all_inputs, labels, n_classes, rows.subspan(n_train + n_val));

  NetworkWeights w = NetworkWeights::random(features, cfg.hidden_dim, n_classes, derive_seed(cfg.seed, "ann-init"));
  w.classes.clear();
  for (const auto& r : db.records()) w.classes.push_back(r.name);

  AnnTrainReport report;
  report.pattern_count = total;
  report.train_count = train.size();
  report.validation_count = val.size();
  report.test_count = test.size();

  NetworkWeights best = w;
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  const bool use_validation = val.size() > 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const Gradients g = compute_gradients(w, train.inputs, train.targets);
    report.train_loss_history.push_back(g.loss);
    const double score = use_validation ? evaluate_split(w, val).mean_ce : g.loss;
    report.epochs_run = epoch + 1;
    if (score < best_score) {
      best_score = score;
      best = w;
      report.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      report.early_stopped = true;
      break;
    }
    w.w1 -= cfg.learning_rate * g.w1;
    w.b1 -= cfg.learning_rate * g.b1;
    w.w2 -= cfg.learning_rate * g.w2;
    w.b2 -= cfg.learning_rate * g.b2;
  }

  const SplitEval tr = evaluate_split(best, train);
  const SplitEval va = evaluate_split(best, val);
  const SplitEval te = evaluate_split(best, test);
  report.cross_entropy = {tr.mean_ce, va.mean_ce, te.mean_ce};
  report.cross_entropy_total = {tr.total_ce, va.total_ce, te.total_ce};
  report.error_rate = {tr.error_rate, va.error_rate, te.error_rate};
  report.converged = report.early_stopped || tr.error_rate == 0.0;
  best.validate();
  return {std::move(best), std::move(report)};
}

// ---------------------------------------------------------------------------
// Prediction and sweeps

AnnPrediction predict_ann(const NetworkWeights& w, const SymptomProfile& profile) {
  const MatrixXd x = encode_inputs(std::span(&profile, 1), w.input_dim);
  const MatrixXd p = forward(w, x);
  AnnPrediction out;
  out.posterior = p.row(0).transpose();
  Eigen::Index arg;
  out.posterior.maxCoeff(&arg);
  out.index = static_cast<std::size_t>(arg);
  out.chemical = w.classes.at(out.index);
  return out;
}

std::vector<std::size_t> predict_ann_batch(const NetworkWeights& w, std::span<const SymptomProfile> profiles) {
  std::vector<std::size_t> out;
  out.reserve(profiles.size());
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0; start < profiles.size(); start += kChunk) {
    const auto chunk = profiles.subspan(start, std::min(kChunk, profiles.size() - start));
    const MatrixXd logits = activate(w, encode_inputs(chunk, w.input_dim)).logits;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      Eigen::Index arg;
      logits.row(i).maxCoeff(&arg);
      out.push_back(static_cast<std::size_t>(arg));
    }
  }
  return out;
}

std::vector<HiddenSweepRow> hidden_sweep(const ChemicalDatabase& db, std::span<const VictimRecord> victims,
                                         std::span<const std::size_t> hidden_dims, std::size_t feature_count,
                                         const AnnTrainConfig& base) {
  if (hidden_dims.empty()) throw std::invalid_argument("hidden sweep needs at least one size");
  if (victims.empty()) throw std::invalid_argument("hidden sweep needs victims to score");
  std::vector<SymptomProfile> observed;
  std::vector<std::size_t> truth;
  observed.reserve(victims.size());
  for (const auto& v : victims) {
    observed.push_back(v.observed);
    truth.push_back(db.require_index(v.true_chemical));
  }

  std::vector<HiddenSweepRow> rows;
  for (auto h : hidden_dims) {
    AnnTrainConfig cfg = base;
    cfg.hidden_dim = h;
    cfg.feature_count = feature_count;
    auto [weights, report] = train_ann(db, cfg);
    const auto predicted = predict_ann_batch(weights, observed);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != truth[i];
    rows.push_back({h, static_cast<double>(wrong) / static_cast<double>(victims.size()), report.error_rate.train,
                    report.epochs_run});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialisation

namespace {

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const char* name) {
  if (!j.is_array() || j.size() != rows) throw DataError(std::string("weight matrix '") + name + "' has wrong row count");
  MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols) {
      throw DataError(std::string("weight matrix '") + name + "' row " + std::to_string(r) + " has wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
  }
  return m;
}

VectorXd vector_from_json(const json& j, std::size_t n, const char* name) {
  if (!j.is_array() || j.size() != n) throw DataError(std::string("bias vector '") + name + "' has wrong length");
  VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

json weights_to_json(const NetworkWeights& w) {
  return json{{"format", "chemid.ann/1"},
              {"activation", "tanh"},
              {"output", "softmax"},
              {"input_dim", w.input_dim},
              {"hidden_dim", w.hidden_dim},
              {"output_dim", w.output_dim},
              {"classes", w.classes},
              {"w1", matrix_to_json(w.w1)},
              {"b1", std::vector<double>(w.b1.data(), w.b1.data() + w.b1.size())},
              {"w2", matrix_to_json(w.w2)},
              {"b2", std::vector<double>(w.b2.data(), w.b2.data() + w.b2.size())}};
}

NetworkWeights weights_from_json(const json& j) {
  try {
    NetworkWeights w;
    w.input_dim = j.at("input_dim").get<std::size_t>();
    w.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    w.output_dim = j.at("output_dim").get<std::size_t>();
    w.classes = j.at("classes").get<std::vector<std::string>>();
    w.w1 = matrix_from_json(j.at("w1"), w.hidden_dim, w.input_dim, "w1");
    w.b1 = vector_from_json(j.at("b1"), w.hidden_dim, "b1");
    w.w2 = matrix_from_json(j.at("w2"), w.output_dim, w.hidden_dim, "w2");
    w.b2 = vector_from_json(j.at("b2"), w.output_dim, "b2");
    w.validate();
    return w;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed network JSON: ") + e.what());
  }
}

void save_weights_file(const NetworkWeights& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << weights_to_json(w).dump() << '\n';
}

NetworkWeights load_weights_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open network file '" + path + "'");
  try {
    return weights_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw DataError(std::string("network file is not JSON: ") + e.what());
  }
}

json report_to_json(const AnnTrainReport& r) {
  auto split = [](const SplitMetrics& m) {
    return json{{"train", m.train}, {"validation", m.validation}, {"test", m.test}};
  };
  return json{{"pattern_count", r.pattern_count},
              {"train_count", r.train_count},
              {"validation_count", r.validation_count},
              {"test_count", r.test_count},
              {"cross_entropy_mean", split(r.cross_entropy)},
              {"cross_entropy_total", split(r.cross_entropy_total)},
              {"error_rate", split(r.error_rate)},
              {"epochs_run", r.epochs_run},
              {"best_epoch", r.best_epoch},
              {"early_stopped", r.early_stopped},
              {"converged", r.converged}};
}

}  // namespace chemid
