#pragma once

// Single-hidden-layer feed-forward classifier: tanh hidden units, softmax
// outputs, cross-entropy loss, full-batch gradient descent.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "chemid/ssx_matrix.hpp"
#include "chemid/victim_sim.hpp"

namespace chemid {

struct NetworkWeights {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t output_dim = 0;
  Eigen::MatrixXd w1;  ///< hidden_dim x input_dim
  Eigen::VectorXd b1;  ///< hidden_dim
  Eigen::MatrixXd w2;  ///< output_dim x hidden_dim
  Eigen::VectorXd b2;  ///< output_dim
  std::vector<std::string> classes;  ///< output index -> chemical name

  /// All parameters zero (uniform posterior everywhere).
  static NetworkWeights zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim);

  /// Uniform in +-1/sqrt(fan_in) for weights, zero biases.
  static NetworkWeights random(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                               std::uint64_t seed);

  std::size_t parameter_count() const noexcept;

  /// Throws DataError on inconsistent dimensions or non-finite values.
  void validate() const;
};

struct AnnTrainConfig {
  std::size_t hidden_dim = 20;
  std::size_t replicas = 5;
  double train_fraction = 0.70;
  double validation_fraction = 0.15;
  double test_fraction = 0.15;
  std::size_t max_epochs = 2000;
  std::size_t patience = 50;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  std::size_t feature_count = 0;  ///< Leading symptoms used as inputs; 0 means all.
};

struct SplitMetrics {
  double train = 0.0;
  double validation = 0.0;
  double test = 0.0;
};

struct AnnTrainReport {
  std::size_t pattern_count = 0;
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
  std::size_t test_count = 0;
  SplitMetrics cross_entropy;        ///< Mean per pattern.
  SplitMetrics cross_entropy_total;  ///< Summed over the split.
  SplitMetrics error_rate;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
  /// False when the epoch budget ran out and the returned weights still
  /// misclassify training patterns.
  bool converged = false;
  std::vector<double> train_loss_history;  ///< Mean training cross-entropy before each update.
};

/// Builds |db| * replicas one-hot patterns from the first feature_count
/// symptoms, splits them at random into train/validation/test, and runs
/// full-batch gradient descent. Training stops after `patience` epochs
/// without a validation improvement, or at max_epochs; the weights with the
/// lowest validation loss are returned (lowest training loss when the
/// validation split is empty).
std::pair<NetworkWeights, AnnTrainReport> train_ann(const ChemicalDatabase& db, const AnnTrainConfig& cfg);

struct AnnPrediction {
  std::size_t index = 0;
  std::string chemical;
  Eigen::VectorXd posterior;
};

/// Uses the first input_dim flags of `profile`. Throws std::invalid_argument
/// when the profile is shorter than input_dim.
AnnPrediction predict_ann(const NetworkWeights& w, const SymptomProfile& profile);

/// Arg-max class index for each profile.
std::vector<std::size_t> predict_ann_batch(const NetworkWeights& w, std::span<const SymptomProfile> profiles);

/// Row i = first input_dim flags of profiles[i] as 0.0/1.0.
Eigen::MatrixXd encode_inputs(std::span<const SymptomProfile> profiles, std::size_t input_dim);

/// Softmax posteriors, one row per input row.
Eigen::MatrixXd forward(const NetworkWeights& w, const Eigen::MatrixXd& inputs);

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  double loss = 0.0;  ///< Mean cross-entropy over the rows.
};

/// Mean cross-entropy and its analytic gradient. `targets` rows are
/// probability vectors (one-hot for classification).
Gradients compute_gradients(const NetworkWeights& w, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);

/// Mean cross-entropy only.
double cross_entropy(const NetworkWeights& w, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);

/// Largest relative deviation between analytic gradients and central finite
/// differences (step 1e-5) over `samples` parameters drawn with `seed`.
/// Relative deviation is |a - n| / max(|a|, |n|, 1e-6).
double gradient_check(const NetworkWeights& w, const Eigen::VectorXd& input, const Eigen::VectorXd& target,
                      std::uint64_t seed = 0, std::size_t samples = 256);

struct HiddenSweepRow {
  std::size_t hidden_dim = 0;
  double victim_error_rate = 0.0;
  double train_error_rate = 0.0;
  std::size_t epochs_run = 0;
};

/// Trains one network per hidden size (other settings from `base`, inputs
/// truncated to feature_count) and scores each on `victims`.
std::vector<HiddenSweepRow> hidden_sweep(const ChemicalDatabase& db, std::span<const VictimRecord> victims,
                                         std::span<const std::size_t> hidden_dims, std::size_t feature_count,
                                         const AnnTrainConfig& base = {});

nlohmann::json weights_to_json(const NetworkWeights& w);
NetworkWeights weights_from_json(const nlohmann::json& j);
void save_weights_file(const NetworkWeights& w, const std::string& path);
NetworkWeights load_weights_file(const std::string& path);

nlohmann::json report_to_json(const AnnTrainReport& r);

}  // namespace chemid
