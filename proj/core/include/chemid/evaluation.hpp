#pragma once

// Accuracy statistics per model and perturbation rate, and the cross-model
// comparison artifacts (JSON summary, accuracy grid CSV, KDE curves, SVG).

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chemid/decision_tree.hpp"
#include "chemid/kde.hpp"
#include "chemid/neural_net.hpp"
#include "chemid/ssx_matrix.hpp"
#include "chemid/victim_sim.hpp"

namespace chemid {

/// 100 * n_correct / n_total. Throws std::invalid_argument when n_total is
/// zero or n_correct exceeds it.
double accuracy(std::size_t n_correct, std::size_t n_total);

/// Grid shared by every per-chemical accuracy KDE so curves from different
/// models are directly comparable.
inline constexpr GridSpec kAccuracyKdeGrid{-0.25, 1.25, 301};

struct AccuracyReport {
  std::string model_id;
  std::string rate_label;
  double rate = 0.0;
  std::size_t n_correct = 0;
  std::size_t n_total = 0;
  double overall = 0.0;  ///< Fraction in [0, 1].
  std::vector<std::pair<std::string, double>> per_chemical;  ///< First-appearance order.
  double max = 0.0;
  double min = 0.0;
  KdeCurve kde;
};

/// "5%" for 0.05.
std::string rate_label(double rate);

/// Aggregates per-victim outcomes: per-chemical fractions, Eq.-style overall
/// accuracy, min/max and a KDE over the per-chemical fractions. `hits[i]`
/// belongs to `victims[i]`. Throws on empty or mismatched input.
AccuracyReport summarize_hits(std::string model_id, std::span<const VictimRecord> victims,
                              const std::vector<bool>& hits);

using HitTest = std::function<bool(const VictimRecord&)>;

AccuracyReport evaluate_model(std::string model_id, const HitTest& hit, std::span<const VictimRecord> victims);

AccuracyReport evaluate_lookup(const ChemicalDatabase& db, std::span<const VictimRecord> victims);
AccuracyReport evaluate_tree(const TrainedTree& tree, std::span<const VictimRecord> victims);
AccuracyReport evaluate_ann(const NetworkWeights& weights, std::span<const VictimRecord> victims);

nlohmann::ordered_json report_to_json(const AccuracyReport& r);
AccuracyReport report_from_json(const nlohmann::ordered_json& j);
void save_report_file(const AccuracyReport& r, const std::string& path);
AccuracyReport load_report_file(const std::string& path);

struct ComparisonSummary {
  std::vector<std::string> models;  ///< First-appearance order.
  std::vector<std::string> rates;   ///< Ascending by rate.
  /// grid[m][r] = overall accuracy, or negative when that cell is missing.
  std::vector<std::vector<double>> grid;
  /// Lookup strictly below every other model at every rate where both exist.
  bool lookup_dominated = false;
  nlohmann::ordered_json document;
};

/// Throws std::invalid_argument on an empty report list.
ComparisonSummary comparison_report(std::span<const AccuracyReport> reports);

/// Writes comparison.json, accuracy_grid.csv, kde_<model>_<rate>.csv per
/// report and accuracy_bars.svg into `dir` (created if needed).
ComparisonSummary write_comparison(std::span<const AccuracyReport> reports, const std::string& dir);

}  // namespace chemid
