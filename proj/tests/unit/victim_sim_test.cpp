#include "chemid/victim_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "chemid/error.hpp"
#include "chemid/ssx_matrix.hpp"

namespace chemid {
namespace {

const ChemicalDatabase& full_db() {
  static const ChemicalDatabase db = generate_synthetic_database(311, 79, 0.5, 1);
  return db;
}

std::vector<VictimRecord> bernoulli(const ChemicalDatabase& db, double rate, std::size_t replicas,
                                    std::uint64_t seed) {
  PerturbationSpec spec;
  spec.mode = BernoulliToggle{rate};
  spec.replicas_per_chemical = replicas;
  spec.seed = seed;
  return simulate_victims(db, spec);
}

double mean_toggles(const std::vector<VictimRecord>& v) {
  double total = 0.0;
  for (const auto& r : v) total += static_cast<double>(r.toggled_indices.size());
  return total / static_cast<double>(v.size());
}

TEST(SimulateVictims, CountAndOrder) {
  const auto victims = bernoulli(full_db(), 0.05, 100, 7);
  ASSERT_EQ(victims.size(), 31100u);
  for (std::size_t c = 0; c < 311; ++c) {
    for (std::size_t r = 0; r < 100; ++r) EXPECT_EQ(victims[c * 100 + r].true_chemical, full_db()[c].name);
  }
}

TEST(SimulateVictims, ZeroRateIsIdentity) {
  for (const auto& v : bernoulli(full_db(), 0.0, 3, 1)) {
    EXPECT_TRUE(v.toggled_indices.empty());
    EXPECT_EQ(v.observed, full_db()[full_db().require_index(v.true_chemical)].profile);
  }
}

TEST(SimulateVictims, BernoulliMeanToggleCount) {
  // Binomial(79, 0.05): mean 3.95, per-victim sd sqrt(79*0.05*0.95) = 1.937,
  // standard error over 31,100 victims 0.011.
  const auto victims = bernoulli(full_db(), 0.05, 100, 3);
  EXPECT_NEAR(mean_toggles(victims), 3.95, 0.05);
}

TEST(SimulateVictims, BernoulliRateConvergesWithinFourStandardErrors) {
  for (double p : {0.02, 0.10, 0.15, 0.5}) {
    const auto victims = bernoulli(full_db(), p, 20, 11);
    const double m = static_cast<double>(victims.size()) * 79.0;
    const double realized = mean_toggles(victims) / 79.0;
    EXPECT_NEAR(realized, p, 4.0 * std::sqrt(p * (1 - p) / m)) << "p=" << p;
  }
}

TEST(SimulateVictims, RecordInvariants) {
  PerturbationSpec spec;
  spec.mode = BernoulliToggle{0.2};
  spec.replicas_per_chemical = 5;
  for (const auto& v : simulate_victims(full_db(), spec)) {
    const auto& truth = full_db()[full_db().require_index(v.true_chemical)].profile;
    std::size_t differing = 0;
    for (std::size_t s = 0; s < 79; ++s) differing += v.observed.test(s) != truth.test(s) ? 1 : 0;
    EXPECT_EQ(differing, v.toggled_indices.size());
    EXPECT_TRUE(std::is_sorted(v.toggled_indices.begin(), v.toggled_indices.end()));
    EXPECT_EQ(std::set<std::size_t>(v.toggled_indices.begin(), v.toggled_indices.end()).size(),
              v.toggled_indices.size());
    for (auto i : v.toggled_indices) EXPECT_LT(i, 79u);
    EXPECT_NO_THROW(validate_victim(full_db(), v));
  }
}

TEST(SimulateVictims, FixedCountTogglesExactlyN) {
  for (std::size_t n : {0u, 1u, 4u, 79u}) {
    PerturbationSpec spec;
    spec.mode = FixedCountToggle{n};
    spec.replicas_per_chemical = 3;
    const auto victims = simulate_victims(full_db(), spec);
    for (const auto& v : victims) {
      EXPECT_EQ(v.toggled_indices.size(), n);
      EXPECT_DOUBLE_EQ(v.rate, static_cast<double>(n) / 79.0);
    }
  }
}

TEST(SimulateVictims, FixedCountIsUniformOverSymptoms) {
  // Each symptom should be chosen with probability n/S = 4/79 per victim.
  PerturbationSpec spec;
  spec.mode = FixedCountToggle{4};
  spec.replicas_per_chemical = 100;
  const auto victims = simulate_victims(full_db(), spec);
  std::vector<double> hits(79, 0.0);
  for (const auto& v : victims)
    for (auto i : v.toggled_indices) hits[i] += 1;
  const double p = 4.0 / 79.0;
  const double m = static_cast<double>(victims.size());
  const double sd = std::sqrt(m * p * (1 - p));
  for (double h : hits) EXPECT_NEAR(h, m * p, 5 * sd);
}

TEST(SimulateVictims, Errors) {
  PerturbationSpec spec;
  spec.mode = FixedCountToggle{80};
  EXPECT_THROW(simulate_victims(full_db(), spec), std::invalid_argument);
  spec.mode = BernoulliToggle{1.5};
  EXPECT_THROW(simulate_victims(full_db(), spec), std::invalid_argument);
  spec.mode = BernoulliToggle{0.1};
  spec.replicas_per_chemical = 0;
  EXPECT_THROW(simulate_victims(full_db(), spec), std::invalid_argument);

  const ChemicalDatabase raw({"a"}, {{"x", SymptomProfile(1)}}, false);
  spec.replicas_per_chemical = 1;
  EXPECT_THROW(simulate_victims(raw, spec), std::invalid_argument);
}

TEST(SimulateVictims, ReproducibleAndSeedSensitive) {
  const auto a = bernoulli(full_db(), 0.1, 4, 99);
  const auto b = bernoulli(full_db(), 0.1, 4, 99);
  const auto c = bernoulli(full_db(), 0.1, 4, 100);
  ASSERT_EQ(a.size(), b.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].observed, b[i].observed);
    EXPECT_EQ(a[i].toggled_indices, b[i].toggled_indices);
    any_diff |= a[i].toggled_indices != c[i].toggled_indices;
  }
  EXPECT_TRUE(any_diff);
}

TEST(SimulateVictims, RecordsIndependentOfReplicaCount) {
  // Per-record seeding: the first replicas of a larger run match a smaller run.
  const auto small = bernoulli(full_db(), 0.1, 2, 5);
  const auto large = bernoulli(full_db(), 0.1, 7, 5);
  for (std::size_t c = 0; c < 311; ++c) {
    for (std::size_t r = 0; r < 2; ++r) {
      EXPECT_EQ(small[c * 2 + r].toggled_indices, large[c * 7 + r].toggled_indices);
    }
  }
}

TEST(PerturbationDensity, DegenerateSpike) {
  PerturbationSpec spec;
  spec.mode = FixedCountToggle{4};
  spec.replicas_per_chemical = 2;
  const auto kde = perturbation_density(simulate_victims(full_db(), spec));
  EXPECT_NEAR(kde.mode(), 4.0, 1e-2);
  EXPECT_NEAR(kde.integral(), 1.0, 1e-3);
  EXPECT_THROW(perturbation_density(std::vector<VictimRecord>{}), std::invalid_argument);
}

TEST(PerturbationDensity, ModesOrderedByRate) {
  std::vector<double> modes;
  for (double rate : {0.05, 0.10, 0.15}) {
    const auto kde = perturbation_density(bernoulli(full_db(), rate, 30, 2));
    EXPECT_NEAR(kde.integral(), 1.0, 1e-3);
    modes.push_back(kde.mode());
  }
  EXPECT_LT(modes[0], modes[1]);
  EXPECT_LT(modes[1], modes[2]);
  EXPECT_GE(modes[1], 6.0);
  EXPECT_LE(modes[1], 10.0);
}

TEST(VictimJsonl, RoundTrip) {
  const auto victims = bernoulli(full_db(), 0.1, 2, 4);
  std::stringstream buf;
  write_victims(victims, buf);
  const auto back = read_victims(buf);
  ASSERT_EQ(back.size(), victims.size());
  for (std::size_t i = 0; i < victims.size(); ++i) {
    EXPECT_EQ(back[i].true_chemical, victims[i].true_chemical);
    EXPECT_EQ(back[i].observed, victims[i].observed);
    EXPECT_EQ(back[i].toggled_indices, victims[i].toggled_indices);
    EXPECT_DOUBLE_EQ(back[i].rate, victims[i].rate);
  }
}

TEST(VictimJsonl, LineFormatAndErrors) {
  std::stringstream buf;
  VictimRecord v{"x", SymptomProfile::from_string("0110"), {1, 3}, 0.5};
  write_victims(std::vector<VictimRecord>{v}, buf);
  const std::string line = buf.str();
  EXPECT_NE(line.find("\"observed\":\"0110\""), std::string::npos);
  EXPECT_EQ(line.back(), '\n');

  std::istringstream bad_json("{\"true_chemical\": \"x\"\n");
  EXPECT_THROW(read_victims(bad_json), DataError);
  std::istringstream missing("{\"true_chemical\":\"x\",\"observed\":\"01\",\"rate\":0.1}\n");
  try {
    read_victims(missing);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(ValidateVictim, DetectsInconsistentRecords) {
  const ChemicalDatabase db({"a", "b", "c"}, {{"x", SymptomProfile::from_string("101")}}, true);
  EXPECT_NO_THROW(validate_victim(db, {"x", SymptomProfile::from_string("100"), {2}, 0.3}));
  EXPECT_THROW(validate_victim(db, {"x", SymptomProfile::from_string("100"), {1}, 0.3}), DataError);
  EXPECT_THROW(validate_victim(db, {"y", SymptomProfile::from_string("101"), {}, 0.3}), DataError);
  EXPECT_THROW(validate_victim(db, {"x", SymptomProfile::from_string("10"), {}, 0.3}), DataError);
}

}  // namespace
}  // namespace chemid
