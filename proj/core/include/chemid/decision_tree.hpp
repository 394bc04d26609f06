#pragma once

// Multiclass binary decision tree grown by maximum deviance reduction.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chemid/ssx_matrix.hpp"

namespace chemid {

struct TreeTrainConfig {
  std::size_t max_splits = 350;
  /// Copies of every profile in the training multiset. Scaling all class
  /// counts uniformly leaves every split decision unchanged.
  std::size_t replication_factor = 1;
};

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t split = kLeaf;  ///< Symptom index tested here, or kLeaf.
  std::int32_t left = -1;      ///< Child for bit 0.
  std::int32_t right = -1;     ///< Child for bit 1.
  std::size_t prediction = 0;  ///< Class index (leaves only).
  std::vector<std::pair<std::size_t, std::size_t>> class_counts;  ///< (class, count), leaves only.

  bool is_leaf() const noexcept { return split == kLeaf; }
};

/// Immutable once trained; prediction is safe from many threads.
struct TrainedTree {
  std::vector<std::string> classes;  ///< Class index -> chemical name.
  std::size_t symptom_count = 0;
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root.
  std::size_t depth = 0;
  std::size_t leaf_count = 0;
  std::size_t split_count = 0;
  double training_accuracy = 0.0;

  const TreeNode& root() const { return nodes.front(); }
};

struct TreeStats {
  std::size_t depth = 0;
  std::size_t leaf_count = 0;
  std::size_t split_count = 0;
  std::vector<std::size_t> leaf_depth_histogram;  ///< [d] = leaves at depth d.
};

/// Deviance (entropy, natural log) of a class histogram with total `n`.
double deviance(const std::vector<std::size_t>& counts, std::size_t n);

/// Greedy top-down induction, expanding nodes breadth first. At each node the
/// symptom with the largest deviance reduction wins; ties go to the lowest
/// index. A branch stops when pure, when no split reduces deviance, or when
/// the split budget is spent. Throws DataError naming chemicals whose profiles
/// are identical (the classes cannot be separated).
TrainedTree train_tree(const ChemicalDatabase& db, const TreeTrainConfig& cfg = {});

/// Index of the leaf reached by `profile`.
std::size_t leaf_for(const TrainedTree& tree, const SymptomProfile& profile);

/// Throws std::invalid_argument on a width mismatch.
const std::string& predict_tree(const TrainedTree& tree, const SymptomProfile& profile);

/// Symptom indices tested on the way to `profile`'s leaf, root first.
std::vector<std::size_t> decision_path(const TrainedTree& tree, const SymptomProfile& profile);

struct AskSymptom {
  std::size_t symptom = 0;
  std::size_t depth = 0;  ///< Number of answered splits above it.
};

struct Identified {
  std::string chemical;
  std::size_t questions = 0;  ///< Splits answered to reach the leaf.
};

using QuestionStep = std::variant<AskSymptom, Identified>;

/// Descends while `answers` covers the encountered split symptoms. Returns
/// the first unanswered split, or the leaf's chemical once a leaf is reached.
QuestionStep question_path(const TrainedTree& tree, const std::map<std::size_t, bool>& answers);

TreeStats tree_stats(const TrainedTree& tree);

/// Same topology, split symptoms and leaf predictions (class counts ignored).
bool same_structure(const TrainedTree& a, const TrainedTree& b);

nlohmann::json tree_to_json(const TrainedTree& tree);
/// Throws DataError on malformed input.
TrainedTree tree_from_json(const nlohmann::json& j);

void save_tree_file(const TrainedTree& tree, const std::string& path);
TrainedTree load_tree_file(const std::string& path);

/// Graphviz rendering; `symptom_names` labels the splits when non-empty.
void write_tree_dot(const TrainedTree& tree, const std::vector<std::string>& symptom_names, std::ostream& out);

}  // namespace chemid
