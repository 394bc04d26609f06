#include "chemid/neural_net.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "chemid/error.hpp"
#include "chemid/random.hpp"
#include "chemid/victim_sim.hpp"

namespace chemid {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const ChemicalDatabase& small_db() {
  static const ChemicalDatabase db = generate_synthetic_database(30, 16, 0.5, 2);
  return db;
}

AnnTrainConfig small_config() {
  AnnTrainConfig cfg;
  cfg.hidden_dim = 12;
  cfg.max_epochs = 600;
  cfg.seed = 3;
  return cfg;
}

const std::pair<NetworkWeights, AnnTrainReport>& small_trained() {
  static const auto result = train_ann(small_db(), small_config());
  return result;
}

MatrixXd random_inputs(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  return x;
}

TEST(NetworkWeights, ZerosGiveUniformPosterior) {
  auto w = NetworkWeights::zeros(6, 4, 5);
  for (int i = 0; i < 5; ++i) w.classes.push_back("c" + std::to_string(i));
  EXPECT_EQ(w.parameter_count(), 6u * 4 + 4 + 5 * 4 + 5);
  const auto p = predict_ann(w, SymptomProfile::from_string("101101"));
  for (Eigen::Index k = 0; k < 5; ++k) EXPECT_NEAR(p.posterior(k), 0.2, 1e-15);
  EXPECT_EQ(p.index, 0u);
}

TEST(NetworkWeights, RandomInitialisationRange) {
  const auto w = NetworkWeights::random(79, 20, 311, 1);
  EXPECT_LE(w.w1.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(79.0));
  EXPECT_LE(w.w2.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(20.0));
  EXPECT_GT(w.w1.cwiseAbs().maxCoeff(), 0.9 / std::sqrt(79.0));
  EXPECT_TRUE(w.b1.isZero());
  EXPECT_TRUE(w.b2.isZero());
  EXPECT_EQ(NetworkWeights::random(79, 20, 311, 1).w1, w.w1);
  EXPECT_NE(NetworkWeights::random(79, 20, 311, 2).w1, w.w1);
}

TEST(NetworkWeights, ValidateCatchesBadShapes) {
  auto w = NetworkWeights::random(3, 2, 2, 0);
  w.classes = {"a", "b"};
  EXPECT_NO_THROW(w.validate());
  auto bad = w;
  bad.b1.resize(5);
  EXPECT_THROW(bad.validate(), DataError);
  bad = w;
  bad.w2(0, 0) = std::nan("");
  EXPECT_THROW(bad.validate(), DataError);
  bad = w;
  bad.classes.pop_back();
  EXPECT_THROW(bad.validate(), DataError);
}

TEST(Forward, SoftmaxIsAProbabilityVector) {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto w = NetworkWeights::random(10, 7, 9, seed);
    w.w2 *= 50.0;  // large logits stress the normalisation
    const MatrixXd p = forward(w, random_inputs(rng, 20, 10));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
      EXPECT_GE(p.row(i).minCoeff(), 0.0);
    }
  }
}

TEST(GradientCheck, RandomNetworksAgreeWithFiniteDifferences) {
  Rng rng(6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto w = NetworkWeights::random(8, 5, 6, seed);
    VectorXd x = random_inputs(rng, 1, 8).row(0).transpose();
    VectorXd t = VectorXd::Zero(6);
    t(static_cast<Eigen::Index>(rng.below(6))) = 1.0;
    EXPECT_LT(gradient_check(w, x, t, seed), 1e-4);
    EXPECT_EQ(gradient_check(w, x, t, seed), gradient_check(w, x, t, seed));
  }
}

TEST(GradientCheck, FullSizeNetworkSampled) {
  const auto w = NetworkWeights::random(79, 20, 311, 7);
  Rng rng(7);
  VectorXd x = random_inputs(rng, 1, 79).row(0).transpose();
  VectorXd t = VectorXd::Zero(311);
  t(42) = 1.0;
  EXPECT_LT(gradient_check(w, x, t, 1, 512), 1e-4);
}

TEST(ComputeGradients, IndependentFiniteDifferenceOnBatch) {
  Rng rng(8);
  const auto w = NetworkWeights::random(5, 4, 3, 8);
  const MatrixXd x = random_inputs(rng, 7, 5);
  MatrixXd t = MatrixXd::Zero(7, 3);
  for (Eigen::Index i = 0; i < 7; ++i) t(i, static_cast<Eigen::Index>(rng.below(3))) = 1.0;
  const Gradients g = compute_gradients(w, x, t);
  EXPECT_NEAR(g.loss, cross_entropy(w, x, t), 1e-15);

  const double h = 1e-6;
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 5; ++c) {
      auto up = w, down = w;
      up.w1(r, c) += h;
      down.w1(r, c) -= h;
      EXPECT_NEAR(g.w1(r, c), (cross_entropy(up, x, t) - cross_entropy(down, x, t)) / (2 * h), 1e-7);
    }
  }
  for (Eigen::Index k = 0; k < 3; ++k) {
    auto up = w, down = w;
    up.b2(k) += h;
    down.b2(k) -= h;
    EXPECT_NEAR(g.b2(k), (cross_entropy(up, x, t) - cross_entropy(down, x, t)) / (2 * h), 1e-7);
  }
}

TEST(ComputeGradients, MatchedTargetIsStationaryForOutputLayer) {
  Rng rng(9);
  const auto w = NetworkWeights::random(6, 4, 5, 9);
  const MatrixXd x = random_inputs(rng, 1, 6);
  const MatrixXd t = forward(w, x);
  const Gradients g = compute_gradients(w, x, t);
  EXPECT_LT(g.w2.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(g.b2.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TrainAnn, PatternCountsForFullProtocol) {
  const auto db = generate_synthetic_database(311, 79, 0.5, 1);
  AnnTrainConfig cfg;
  cfg.max_epochs = 1;
  const auto [w, r] = train_ann(db, cfg);
  EXPECT_EQ(r.pattern_count, 1555u);
  EXPECT_EQ(r.train_count, 1089u);
  EXPECT_EQ(r.validation_count, 233u);
  EXPECT_EQ(r.test_count, 233u);
  EXPECT_EQ(w.input_dim, 79u);
  EXPECT_EQ(w.output_dim, 311u);
  EXPECT_EQ(r.epochs_run, 1u);
  EXPECT_FALSE(r.converged);

  cfg.feature_count = 40;
  EXPECT_EQ(train_ann(db, cfg).first.input_dim, 40u);
}

TEST(TrainAnn, SmallDatabaseConverges) {
  const auto& [w, r] = small_trained();
  EXPECT_EQ(r.error_rate.train, 0.0);
  EXPECT_TRUE(r.converged);
  for (const auto& rec : small_db().records()) EXPECT_EQ(predict_ann(w, rec.profile).chemical, rec.name);
  for (double e : {r.error_rate.train, r.error_rate.validation, r.error_rate.test}) {
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
  }
  EXPECT_NEAR(r.cross_entropy_total.train, r.cross_entropy.train * static_cast<double>(r.train_count), 1e-9);
  EXPECT_EQ(r.train_loss_history.size(), r.epochs_run);
  EXPECT_LT(r.best_epoch, r.epochs_run);
}

TEST(TrainAnn, SeparableTwoClassToy) {
  // Profiles 10 and 01: the boundary x0 - x1 = 0 separates them linearly.
  const ChemicalDatabase db({"a", "b"},
                            {{"left", SymptomProfile::from_string("10")}, {"right", SymptomProfile::from_string("01")}},
                            true);
  bool separable = false;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c) separable |= (a + c > 0) && (b + c < 0);
  ASSERT_TRUE(separable);
  AnnTrainConfig cfg;
  cfg.hidden_dim = 2;
  cfg.max_epochs = 500;
  const auto [w, r] = train_ann(db, cfg);
  EXPECT_EQ(r.error_rate.train, 0.0);
  EXPECT_EQ(predict_ann(w, SymptomProfile::from_string("10")).chemical, "left");
  EXPECT_EQ(predict_ann(w, SymptomProfile::from_string("01")).chemical, "right");
}

TEST(TrainAnn, LossNonIncreasingUnderSmallStep) {
  AnnTrainConfig cfg = small_config();
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 300;
  cfg.validation_fraction = 0.0;
  cfg.test_fraction = 0.0;
  cfg.train_fraction = 1.0;
  const auto r = train_ann(small_db(), cfg).second;
  ASSERT_GT(r.train_loss_history.size(), 1u);
  for (std::size_t i = 1; i < r.train_loss_history.size(); ++i) {
    EXPECT_LE(r.train_loss_history[i], r.train_loss_history[i - 1] + 1e-12) << "epoch " << i;
  }
}

TEST(TrainAnn, DeterministicUnderSeed) {
  const auto [w, r] = train_ann(small_db(), small_config());
  EXPECT_EQ(w.w1, small_trained().first.w1);
  EXPECT_EQ(w.b2, small_trained().first.b2);
  EXPECT_EQ(r.train_loss_history, small_trained().second.train_loss_history);
}

TEST(TrainAnn, EarlyStopsWhenValidationStalls) {
  AnnTrainConfig cfg = small_config();
  cfg.learning_rate = 5.0;  // overshoots, so validation loss stops improving
  cfg.patience = 5;
  cfg.max_epochs = 2000;
  const auto r = train_ann(small_db(), cfg).second;
  if (r.early_stopped) {
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.epochs_run, r.best_epoch + cfg.patience + 1);
  } else {
    EXPECT_EQ(r.epochs_run, cfg.max_epochs);
  }
}

TEST(TrainAnn, RejectsBadConfigs) {
  AnnTrainConfig cfg;
  cfg.feature_count = 17;
  EXPECT_THROW(train_ann(small_db(), cfg), std::invalid_argument);
  cfg = {};
  cfg.hidden_dim = 0;
  EXPECT_THROW(train_ann(small_db(), cfg), std::invalid_argument);
  cfg = {};
  cfg.train_fraction = 0.8;
  EXPECT_THROW(train_ann(small_db(), cfg), std::invalid_argument);
  cfg = {};
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train_ann(small_db(), cfg), std::invalid_argument);
}

TEST(PredictAnn, BatchMatchesSingle) {
  const auto& w = small_trained().first;
  PerturbationSpec spec;
  spec.mode = BernoulliToggle{0.2};
  spec.replicas_per_chemical = 10;
  const auto victims = simulate_victims(small_db(), spec);
  std::vector<SymptomProfile> obs;
  for (const auto& v : victims) obs.push_back(v.observed);
  const auto batch = predict_ann_batch(w, obs);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto p = predict_ann(w, obs[i]);
    EXPECT_EQ(batch[i], p.index);
    EXPECT_NEAR(p.posterior.sum(), 1.0, 1e-9);
  }
  EXPECT_THROW(predict_ann(w, SymptomProfile(15)), std::invalid_argument);
  // Longer profiles are truncated to the leading input_dim flags.
  SymptomProfile wide(20);
  EXPECT_NO_THROW(predict_ann(w, wide));
}

TEST(HiddenSweep, SingleRowMatchesDirectTraining) {
  PerturbationSpec spec;
  spec.mode = BernoulliToggle{0.05};
  spec.replicas_per_chemical = 20;
  const auto victims = simulate_victims(small_db(), spec);
  AnnTrainConfig base = small_config();
  const std::vector<std::size_t> dims{12};
  const auto rows = hidden_sweep(small_db(), victims, dims, 0, base);
  ASSERT_EQ(rows.size(), 1u);

  const auto& w = small_trained().first;
  std::size_t wrong = 0;
  for (const auto& v : victims) wrong += predict_ann(w, v.observed).chemical != v.true_chemical;
  EXPECT_DOUBLE_EQ(rows[0].victim_error_rate, static_cast<double>(wrong) / static_cast<double>(victims.size()));
  EXPECT_EQ(rows[0].hidden_dim, 12u);
  EXPECT_EQ(rows[0].epochs_run, small_trained().second.epochs_run);

  EXPECT_THROW(hidden_sweep(small_db(), victims, std::vector<std::size_t>{}, 0, base), std::invalid_argument);
}

TEST(WeightsJson, RoundTrip) {
  const auto& w = small_trained().first;
  const auto back = weights_from_json(weights_to_json(w));
  EXPECT_EQ(back.w1, w.w1);
  EXPECT_EQ(back.b1, w.b1);
  EXPECT_EQ(back.w2, w.w2);
  EXPECT_EQ(back.b2, w.b2);
  EXPECT_EQ(back.classes, w.classes);

  const auto path = (std::filesystem::temp_directory_path() / "chemid_ann_test.json").string();
  save_weights_file(w, path);
  EXPECT_EQ(load_weights_file(path).w2, w.w2);
  std::filesystem::remove(path);
  EXPECT_THROW(load_weights_file(path), DataError);

  auto j = weights_to_json(w);
  j["w1"].erase(0);
  EXPECT_THROW(weights_from_json(j), DataError);
}

TEST(ReportJson, CarriesBothCrossEntropyForms) {
  const auto j = report_to_json(small_trained().second);
  EXPECT_TRUE(j.contains("cross_entropy_mean"));
  EXPECT_TRUE(j.contains("cross_entropy_total"));
  EXPECT_TRUE(j.contains("error_rate"));
  EXPECT_EQ(j.at("pattern_count").get<std::size_t>(), 150u);
}

}  // namespace
}  // namespace chemid
