#pragma once

// End-to-end pipeline: database -> dedup -> victims per rate -> tree + network
// -> accuracy reports for all models and rates -> comparison artifacts.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemid/decision_tree.hpp"
#include "chemid/evaluation.hpp"
#include "chemid/neural_net.hpp"

namespace chemid {

struct ExperimentConfig {
  std::optional<std::string> db_path;  ///< CSV to load; synthetic database when absent.
  std::size_t synthetic_chemicals = 311;
  std::size_t synthetic_symptoms = 79;
  double synthetic_density = 0.5;
  std::vector<double> rates{0.05, 0.10, 0.15};
  std::size_t replicas = 100;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  TreeTrainConfig tree;
  AnnTrainConfig ann;  ///< `seed` is replaced by one derived from the root seed.

  /// Throws std::invalid_argument when rates or replicas are out of range.
  void validate() const;
};

/// A pipeline stage failed; what() names the stage and the cause.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct ExperimentResult {
  std::vector<AccuracyReport> reports;  ///< Model-major: lookup, tree, ann; rates ascending.
  ComparisonSummary summary;
  TreeStats tree_stats;
  AnnTrainReport ann_report;
  std::vector<KdeCurve> perturbation_kdes;  ///< One per rate.
};

/// Runs every stage and persists each artifact under output_dir. Re-running
/// with the same configuration reproduces every file byte for byte.
ExperimentResult run_full_experiment(const ExperimentConfig& cfg);

/// File-name fragment for a rate, e.g. "5p" for 0.05.
std::string rate_tag(double rate);

}  // namespace chemid
