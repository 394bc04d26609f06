#include "chemid/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "chemid/error.hpp"

namespace chemid {

namespace {

using json = nlohmann::json;

// Gains closer than this are treated as tied. Floating-point rounding differs
// between replicated and unreplicated counts by far less.
constexpr double kGainTieTolerance = 1e-10;

double xlogx(std::size_t c) {
  if (c == 0) return 0.0;
  const auto x = static_cast<double>(c);
  return x * std::log(x);
}

// Deviance restricted to the listed classes.
double deviance_of(const std::vector<std::size_t>& counts, const std::vector<std::size_t>& present, std::size_t n) {
  if (n == 0) return 0.0;
  double s = 0.0;
  for (auto c : present) s += xlogx(counts[c]);
  const auto nn = static_cast<double>(n);
  return std::log(nn) - s / nn;
}

struct PendingNode {
  std::int32_t index;
  std::vector<std::size_t> samples;  // class index per training sample
  std::size_t depth;
};

void check_separable(const ChemicalDatabase& db) {
  std::unordered_map<SymptomProfile, std::size_t, SymptomProfileHash> seen;
  for (std::size_t i = 0; i < db.size(); ++i) {
    auto [it, inserted] = seen.emplace(db[i].profile, i);
    if (!inserted) {
      throw DataError("chemicals '" + db[it->second].name + "' and '" + db[i].name +
                      "' share an identical profile and cannot be separated");
    }
  }
}

void make_leaf(TreeNode& node, const std::vector<std::size_t>& samples, std::size_t n_classes) {
  std::vector<std::size_t> counts(n_classes, 0);
  for (auto c : samples) ++counts[c];
  node.split = TreeNode::kLeaf;
  node.class_counts.clear();
  std::size_t best = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] == 0) continue;
    node.class_counts.emplace_back(c, counts[c]);
    if (counts[c] > counts[best]) best = c;  // strict: ties keep the lowest index
  }
  node.prediction = best;
}

void recompute_stats(TrainedTree& tree) {
  const TreeStats s = tree_stats(tree);
  tree.depth = s.depth;
  tree.leaf_count = s.leaf_count;
  tree.split_count = s.split_count;
}

}  // namespace

double deviance(const std::vector<std::size_t>& counts, std::size_t n) {
  if (n == 0) return 0.0;
  double s = 0.0;
  for (auto c : counts) s += xlogx(c);
  return std::log(static_cast<double>(n)) - s / static_cast<double>(n);
}

TrainedTree train_tree(const ChemicalDatabase& db, const TreeTrainConfig& cfg) {
  if (db.empty()) throw std::invalid_argument("cannot train a tree on an empty database");
  if (cfg.replication_factor == 0) throw std::invalid_argument("replication_factor must be positive");
  check_separable(db);

  const std::size_t n_classes = db.size();
  const std::size_t width = db.symptom_count();

  TrainedTree tree;
  tree.symptom_count = width;
  for (const auto& r : db.records()) tree.classes.push_back(r.name);

  std::vector<std::size_t> root_samples;
  root_samples.reserve(n_classes * cfg.replication_factor);
  for (std::size_t rep = 0; rep < cfg.replication_factor; ++rep) {
    for (std::size_t c = 0; c < n_classes; ++c) root_samples.push_back(c);
  }

  tree.nodes.emplace_back();
  std::deque<PendingNode> queue;
  queue.push_back({0, std::move(root_samples), 0});

  std::vector<std::size_t> parent_counts(n_classes, 0);
  std::vector<std::size_t> right_counts(n_classes, 0);
  std::vector<std::size_t> left_counts(n_classes, 0);
  std::vector<std::size_t> present;
  std::size_t splits = 0;

  while (!queue.empty()) {
    PendingNode pending = std::move(queue.front());
    queue.pop_front();

    present.clear();
    for (auto c : pending.samples) {
      if (parent_counts[c]++ == 0) present.push_back(c);
    }
    const std::size_t n = pending.samples.size();
    const double parent_dev = deviance_of(parent_counts, present, n);

    std::int32_t best_feature = -1;
    double best_gain = 0.0;
    if (present.size() > 1 && splits < cfg.max_splits) {
      for (std::size_t f = 0; f < width; ++f) {
        std::size_t n_right = 0;
        for (auto c : pending.samples) {
          if (db[c].profile.test(f)) {
            ++right_counts[c];
            ++n_right;
          }
        }
        const std::size_t n_left = n - n_right;
        if (n_right != 0 && n_left != 0) {
          for (auto c : present) left_counts[c] = parent_counts[c] - right_counts[c];
          const double child = (static_cast<double>(n_left) * deviance_of(left_counts, present, n_left) +
                                static_cast<double>(n_right) * deviance_of(right_counts, present, n_right)) /
                               static_cast<double>(n);
          const double gain = parent_dev - child;
          if (gain > kGainTieTolerance && gain > best_gain + kGainTieTolerance) {
            best_gain = gain;
            best_feature = static_cast<std::int32_t>(f);
          }
        }
        for (auto c : present) right_counts[c] = 0;
      }
    }

    for (auto c : present) parent_counts[c] = 0;

    if (best_feature < 0) {
      make_leaf(tree.nodes[static_cast<std::size_t>(pending.index)], pending.samples, n_classes);
      continue;
    }

    std::vector<std::size_t> left_samples, right_samples;
    for (auto c : pending.samples) {
      (db[c].profile.test(static_cast<std::size_t>(best_feature)) ? right_samples : left_samples).push_back(c);
    }
    const auto left_index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[static_cast<std::size_t>(pending.index)];
    node.split = best_feature;
    node.left = left_index;
    node.right = left_index + 1;
    ++splits;
    queue.push_back({left_index, std::move(left_samples), pending.depth + 1});
    queue.push_back({left_index + 1, std::move(right_samples), pending.depth + 1});
  }

  recompute_stats(tree);
  std::size_t correct = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (tree.nodes[leaf_for(tree, db[c].profile)].prediction == c) ++correct;
  }
  tree.training_accuracy = static_cast<double>(correct) / static_cast<double>(n_classes);
  return tree;
}

std::size_t leaf_for(const TrainedTree& tree, const SymptomProfile& profile) {
  if (profile.size() != tree.symptom_count) {
    throw std::invalid_argument("profile has " + std::to_string(profile.size()) + " symptoms, tree expects " +
                                std::to_string(tree.symptom_count));
  }
  std::size_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const auto& n = tree.nodes[i];
    i = static_cast<std::size_t>(profile.test(static_cast<std::size_t>(n.split)) ? n.right : n.left);
  }
  return i;
}

const std::string& predict_tree(const TrainedTree& tree, const SymptomProfile& profile) {
  return tree.classes[tree.nodes[leaf_for(tree, profile)].prediction];
}

std::vector<std::size_t> decision_path(const TrainedTree& tree, const SymptomProfile& profile) {
  leaf_for(tree, profile);  // width check
  std::vector<std::size_t> path;
  std::size_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const auto& n = tree.nodes[i];
    const auto s = static_cast<std::size_t>(n.split);
    path.push_back(s);
    i = static_cast<std::size_t>(profile.test(s) ? n.right : n.left);
  }
  return path;
}

QuestionStep question_path(const TrainedTree& tree, const std::map<std::size_t, bool>& answers) {
  std::size_t i = 0;
  std::size_t depth = 0;
  while (!tree.nodes[i].is_leaf()) {
    const auto& n = tree.nodes[i];
    const auto s = static_cast<std::size_t>(n.split);
    const auto it = answers.find(s);
    if (it == answers.end()) return AskSymptom{s, depth};
    i = static_cast<std::size_t>(it->second ? n.right : n.left);
    ++depth;
  }
  return Identified{tree.classes[tree.nodes[i].prediction], depth};
}

TreeStats tree_stats(const TrainedTree& tree) {
  TreeStats s;
  if (tree.nodes.empty()) return s;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    const auto& n = tree.nodes[i];
    if (n.is_leaf()) {
      ++s.leaf_count;
      s.depth = std::max(s.depth, d);
      if (s.leaf_depth_histogram.size() <= d) s.leaf_depth_histogram.resize(d + 1, 0);
      ++s.leaf_depth_histogram[d];
    } else {
      ++s.split_count;
      stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
      stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
    }
  }
  return s;
}

bool same_structure(const TrainedTree& a, const TrainedTree& b) {
  if (a.classes != b.classes || a.symptom_count != b.symptom_count) return false;
  std::function<bool(std::size_t, std::size_t)> eq = [&](std::size_t i, std::size_t j) {
    const auto& x = a.nodes[i];
    const auto& y = b.nodes[j];
    if (x.split != y.split) return false;
    if (x.is_leaf()) return x.prediction == y.prediction;
    return eq(static_cast<std::size_t>(x.left), static_cast<std::size_t>(y.left)) &&
           eq(static_cast<std::size_t>(x.right), static_cast<std::size_t>(y.right));
  };
  return !a.nodes.empty() && !b.nodes.empty() && eq(0, 0);
}

// ---------------------------------------------------------------------------
// Serialisation

namespace {

json node_to_json(const TrainedTree& tree, std::size_t i) {
  const auto& n = tree.nodes[i];
  if (n.is_leaf()) {
    json counts = json::object();
    for (auto [c, k] : n.class_counts) counts[tree.classes[c]] = k;
    return json{{"leaf", tree.classes[n.prediction]}, {"counts", std::move(counts)}};
  }
  return json{{"split", n.split},
              {"left", node_to_json(tree, static_cast<std::size_t>(n.left))},
              {"right", node_to_json(tree, static_cast<std::size_t>(n.right))}};
}

std::int32_t node_from_json(const json& j, TrainedTree& tree,
                            const std::unordered_map<std::string, std::size_t>& class_index) {
  const auto index = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    const auto name = j.at("leaf").get<std::string>();
    const auto it = class_index.find(name);
    if (it == class_index.end()) throw DataError("tree leaf names unknown class '" + name + "'");
    auto& node = tree.nodes[static_cast<std::size_t>(index)];
    node.prediction = it->second;
    if (j.contains("counts")) {
      for (const auto& [k, v] : j.at("counts").items()) {
        const auto ci = class_index.find(k);
        if (ci == class_index.end()) throw DataError("tree leaf counts name unknown class '" + k + "'");
        node.class_counts.emplace_back(ci->second, v.get<std::size_t>());
      }
      std::sort(node.class_counts.begin(), node.class_counts.end());
    }
    return index;
  }
  const auto split = j.at("split").get<std::int64_t>();
  if (split < 0 || static_cast<std::size_t>(split) >= tree.symptom_count) {
    throw DataError("tree split index " + std::to_string(split) + " out of range");
  }
  const auto left = node_from_json(j.at("left"), tree, class_index);
  const auto right = node_from_json(j.at("right"), tree, class_index);
  auto& node = tree.nodes[static_cast<std::size_t>(index)];
  node.split = static_cast<std::int32_t>(split);
  node.left = left;
  node.right = right;
  return index;
}

}  // namespace

json tree_to_json(const TrainedTree& tree) {
  return json{{"format", "chemid.tree/1"},
              {"symptom_count", tree.symptom_count},
              {"classes", tree.classes},
              {"depth", tree.depth},
              {"leaf_count", tree.leaf_count},
              {"split_count", tree.split_count},
              {"training_accuracy", tree.training_accuracy},
              {"root", node_to_json(tree, 0)}};
}

TrainedTree tree_from_json(const json& j) {
  try {
    TrainedTree tree;
    tree.symptom_count = j.at("symptom_count").get<std::size_t>();
    tree.classes = j.at("classes").get<std::vector<std::string>>();
    std::unordered_map<std::string, std::size_t> class_index;
    for (std::size_t i = 0; i < tree.classes.size(); ++i) class_index.emplace(tree.classes[i], i);
    node_from_json(j.at("root"), tree, class_index);
    recompute_stats(tree);
    tree.training_accuracy = j.value("training_accuracy", 0.0);
    return tree;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed tree JSON: ") + e.what());
  }
}

void save_tree_file(const TrainedTree& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << tree_to_json(tree).dump(1) << '\n';
}

TrainedTree load_tree_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open tree file '" + path + "'");
  try {
    return tree_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw DataError(std::string("tree file is not JSON: ") + e.what());
  }
}

void write_tree_dot(const TrainedTree& tree, const std::vector<std::string>& symptom_names, std::ostream& out) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q.push_back('\\');
      q.push_back(c);
    }
    return q + "\"";
  };
  out << "digraph tree {\n  node [shape=box, fontsize=10];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    if (n.is_leaf()) {
      out << "  n" << i << " [shape=ellipse, label=" << quote(tree.classes[n.prediction]) << "];\n";
      continue;
    }
    const auto s = static_cast<std::size_t>(n.split);
    const std::string label = s < symptom_names.size() ? symptom_names[s] : "ssx " + std::to_string(s);
    out << "  n" << i << " [label=" << quote(label) << "];\n";
    out << "  n" << i << " -> n" << n.left << " [label=\"0\"];\n";
    out << "  n" << i << " -> n" << n.right << " [label=\"1\"];\n";
  }
  out << "}\n";
}

}  // namespace chemid
