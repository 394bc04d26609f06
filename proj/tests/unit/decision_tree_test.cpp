#include "chemid/decision_tree.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chemid/error.hpp"
#include "chemid/random.hpp"
#include "oracles.hpp"

namespace chemid {
namespace {

const ChemicalDatabase& full_db() {
  static const ChemicalDatabase db = generate_synthetic_database(311, 79, 0.5, 1);
  return db;
}

const TrainedTree& full_tree() {
  static const TrainedTree t = train_tree(full_db());
  return t;
}

// Training chemicals (class indices) reaching node `target`.
std::vector<std::size_t> samples_at(const TrainedTree& tree, const ChemicalDatabase& db, std::size_t target) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < db.size(); ++c) {
    std::size_t node = 0;
    while (true) {
      if (node == target) {
        out.push_back(c);
        break;
      }
      const auto& n = tree.nodes[node];
      if (n.is_leaf()) break;
      node = static_cast<std::size_t>(db[c].profile.test(static_cast<std::size_t>(n.split)) ? n.right : n.left);
    }
  }
  return out;
}

// Entropy reduction of splitting single-sample classes on symptom s.
double oracle_gain(const ChemicalDatabase& db, const std::vector<std::size_t>& samples, std::size_t s) {
  std::vector<std::size_t> left, right;
  for (auto c : samples) (db[c].profile.test(s) ? right : left).push_back(1);
  const double n = static_cast<double>(samples.size());
  return oracle::entropy(std::vector<std::size_t>(samples.size(), 1)) -
         (static_cast<double>(left.size()) / n) * oracle::entropy(left) -
         (static_cast<double>(right.size()) / n) * oracle::entropy(right);
}

TEST(Deviance, MatchesEntropyOracle) {
  EXPECT_DOUBLE_EQ(deviance({}, 0), 0.0);
  EXPECT_DOUBLE_EQ(deviance({5}, 5), 0.0);
  EXPECT_NEAR(deviance({1, 1}, 2), std::log(2.0), 1e-15);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::size_t> counts(1 + rng.below(10));
    std::size_t n = 0;
    for (auto& c : counts) n += (c = rng.below(20));
    if (n == 0) continue;
    EXPECT_NEAR(deviance(counts, n), oracle::entropy(counts), 1e-12);
  }
}

TEST(TrainTree, FullDatabaseSeparatesEveryClass) {
  const auto& t = full_tree();
  EXPECT_DOUBLE_EQ(t.training_accuracy, 1.0);
  EXPECT_GE(t.depth, 9u);
  EXPECT_LE(t.depth, 14u);
  EXPECT_LE(t.split_count, 350u);
  EXPECT_GE(t.leaf_count, 311u);
  EXPECT_EQ(t.leaf_count, t.split_count + 1);
  for (const auto& r : full_db().records()) EXPECT_EQ(predict_tree(t, r.profile), r.name);
}

TEST(TrainTree, TwoChemicalsOneDifferingBit) {
  const ChemicalDatabase db({"a", "b", "c"},
                            {{"x", SymptomProfile::from_string("101")}, {"y", SymptomProfile::from_string("111")}},
                            true);
  const auto t = train_tree(db);
  EXPECT_EQ(t.depth, 1u);
  EXPECT_EQ(t.split_count, 1u);
  EXPECT_EQ(t.root().split, 1);
  EXPECT_EQ(t.classes[t.nodes[static_cast<std::size_t>(t.root().left)].prediction], "x");
  EXPECT_EQ(t.classes[t.nodes[static_cast<std::size_t>(t.root().right)].prediction], "y");
}

TEST(TrainTree, SingleChemicalIsOneLeaf) {
  const ChemicalDatabase db({"a"}, {{"x", SymptomProfile::from_string("1")}}, true);
  const auto t = train_tree(db);
  const auto s = tree_stats(t);
  EXPECT_EQ(s.depth, 0u);
  EXPECT_EQ(s.leaf_count, 1u);
  EXPECT_EQ(s.split_count, 0u);
  EXPECT_EQ(s.leaf_depth_histogram, (std::vector<std::size_t>{1}));
}

TEST(TrainTree, IdenticalProfilesNameTheCollision) {
  const ChemicalDatabase db({"a", "b"},
                            {{"first", SymptomProfile::from_string("10")},
                             {"second", SymptomProfile::from_string("01")},
                             {"third", SymptomProfile::from_string("10")}},
                            false);
  try {
    train_tree(db);
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("first"), std::string::npos);
    EXPECT_NE(msg.find("third"), std::string::npos);
  }
}

TEST(TrainTree, GreedyOptimalityAndTieBreak) {
  const auto& t = full_tree();
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& node = t.nodes[i];
    if (node.is_leaf()) continue;
    const auto samples = samples_at(t, full_db(), i);
    const auto chosen = static_cast<std::size_t>(node.split);
    const double g = oracle_gain(full_db(), samples, chosen);
    for (std::size_t s = 0; s < 79; ++s) {
      const double alt = oracle_gain(full_db(), samples, s);
      EXPECT_GE(g, alt - 1e-9) << "node " << i << " symptom " << s;
      if (s < chosen) {
        EXPECT_LT(alt, g + 1e-9) << "lower-index tie at node " << i;
      }
    }
  }
}

TEST(TrainTree, ReplicationInvariance) {
  TreeTrainConfig cfg;
  cfg.replication_factor = 312;
  const auto replicated = train_tree(full_db(), cfg);
  EXPECT_TRUE(same_structure(replicated, full_tree()));
  EXPECT_DOUBLE_EQ(replicated.training_accuracy, 1.0);

  const auto small = generate_synthetic_database(40, 12, 0.5, 9);
  for (std::size_t f : {2u, 3u, 17u}) {
    cfg.replication_factor = f;
    EXPECT_TRUE(same_structure(train_tree(small, cfg), train_tree(small)));
  }
}

TEST(TrainTree, Deterministic) { EXPECT_TRUE(same_structure(train_tree(full_db()), full_tree())); }

TEST(TrainTree, SplitBudgetBindsWithMajorityLeaves) {
  TreeTrainConfig cfg;
  cfg.max_splits = 10;
  const auto t = train_tree(full_db(), cfg);
  EXPECT_EQ(t.split_count, 10u);
  EXPECT_EQ(t.leaf_count, 11u);
  EXPECT_LT(t.training_accuracy, 1.0);
  for (const auto& n : t.nodes) {
    if (!n.is_leaf()) continue;
    // Every class has one sample, so the majority tie goes to the lowest index.
    std::size_t lowest = n.class_counts.front().first;
    for (const auto& [c, k] : n.class_counts) lowest = std::min(lowest, c);
    EXPECT_EQ(n.prediction, lowest);
  }
  cfg.max_splits = 0;
  EXPECT_EQ(train_tree(full_db(), cfg).leaf_count, 1u);
}

TEST(PredictTree, NonPathTogglesLeavePredictionUnchanged) {
  const auto& t = full_tree();
  Rng rng(4);
  for (const auto& r : full_db().records()) {
    const auto path = decision_path(t, r.profile);
    auto q = r.profile;
    for (int k = 0; k < 5; ++k) {
      const std::size_t s = rng.below(79);
      if (std::find(path.begin(), path.end(), s) == path.end()) q.flip(s);
    }
    EXPECT_EQ(predict_tree(t, q), r.name);
  }
  EXPECT_THROW(predict_tree(t, SymptomProfile(78)), std::invalid_argument);
}

TEST(PredictTree, TotalOverRandomProfiles) {
  const auto& t = full_tree();
  Rng rng(8);
  for (int k = 0; k < 1000; ++k) {
    SymptomProfile q(79);
    for (std::size_t s = 0; s < 79; ++s) q.set(s, rng.bernoulli(0.5));
    const auto leaf = leaf_for(t, q);
    ASSERT_LT(leaf, t.nodes.size());
    EXPECT_TRUE(t.nodes[leaf].is_leaf());
    std::size_t depth = 0, node = 0;
    while (!t.nodes[node].is_leaf()) {
      const auto& n = t.nodes[node];
      node = static_cast<std::size_t>(q.test(static_cast<std::size_t>(n.split)) ? n.right : n.left);
      ++depth;
    }
    EXPECT_EQ(decision_path(t, q).size(), depth);
  }
}

TEST(QuestionPath, EmptyPartialAndComplete) {
  const auto& t = full_tree();
  const auto first = question_path(t, {});
  ASSERT_TRUE(std::holds_alternative<AskSymptom>(first));
  EXPECT_EQ(std::get<AskSymptom>(first).symptom, static_cast<std::size_t>(t.root().split));
  EXPECT_EQ(std::get<AskSymptom>(first).depth, 0u);

  for (const auto& r : full_db().records()) {
    std::map<std::size_t, bool> answers;
    std::size_t asked = 0;
    while (true) {
      const auto step = question_path(t, answers);
      if (const auto* id = std::get_if<Identified>(&step)) {
        EXPECT_EQ(id->chemical, r.name);
        EXPECT_EQ(id->questions, asked);
        break;
      }
      const auto& ask = std::get<AskSymptom>(step);
      EXPECT_EQ(ask.depth, asked);
      EXPECT_FALSE(answers.contains(ask.symptom));
      answers[ask.symptom] = r.profile.test(ask.symptom);
      ASSERT_LE(++asked, t.depth);
    }
  }
}

TEST(TreeStats, StructuralIdentities) {
  const auto s = tree_stats(full_tree());
  EXPECT_EQ(s.leaf_count, s.split_count + 1);
  EXPECT_EQ(s.depth, full_tree().depth);
  EXPECT_EQ(s.leaf_depth_histogram.size(), s.depth + 1);
  std::size_t leaves = 0;
  for (auto c : s.leaf_depth_histogram) leaves += c;
  EXPECT_EQ(leaves, s.leaf_count);
  EXPECT_GT(s.leaf_depth_histogram.back(), 0u);
}

TEST(TreeJson, RoundTripAndErrors) {
  const auto j = tree_to_json(full_tree());
  const auto back = tree_from_json(j);
  EXPECT_TRUE(same_structure(back, full_tree()));
  EXPECT_EQ(back.depth, full_tree().depth);
  EXPECT_EQ(back.classes, full_tree().classes);
  for (const auto& r : full_db().records()) EXPECT_EQ(predict_tree(back, r.profile), r.name);

  auto bad = j;
  bad["root"] = {{"split", 500}, {"left", j["root"]["left"]}, {"right", j["root"]["right"]}};
  EXPECT_THROW(tree_from_json(bad), DataError);
  EXPECT_THROW(tree_from_json(nlohmann::json::object()), DataError);
  EXPECT_THROW(tree_from_json(nlohmann::json::parse(R"({"root": {"leaf": "ghost"}})")), DataError);
}

TEST(TreeJson, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "chemid_tree_test.json").string();
  save_tree_file(full_tree(), path);
  EXPECT_TRUE(same_structure(load_tree_file(path), full_tree()));
  std::filesystem::remove(path);
  EXPECT_THROW(load_tree_file(path), DataError);
}

TEST(TreeDot, MentionsSplitsAndLeaves) {
  std::ostringstream out;
  write_tree_dot(full_tree(), full_db().symptom_names(), out);
  const std::string dot = out.str();
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find(full_db().symptom_names()[static_cast<std::size_t>(full_tree().root().split)]),
            std::string::npos);
  EXPECT_NE(dot.find(full_db()[0].name), std::string::npos);
}

}  // namespace
}  // namespace chemid
