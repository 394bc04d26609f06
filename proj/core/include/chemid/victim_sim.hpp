#pragma once

// Simulated victims: ideal chemical profiles with randomly toggled symptoms.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chemid/kde.hpp"
#include "chemid/ssx_matrix.hpp"

namespace chemid {

struct VictimRecord {
  std::string true_chemical;
  SymptomProfile observed;
  std::vector<std::size_t> toggled_indices;  ///< Ascending, distinct.
  double rate = 0.0;                         ///< Nominal per-symptom toggle probability.
};

/// Every symptom toggles independently with probability `rate`.
struct BernoulliToggle {
  double rate = 0.05;
};

/// Exactly `count` distinct symptoms toggle, chosen uniformly.
struct FixedCountToggle {
  std::size_t count = 4;
};

struct PerturbationSpec {
  std::variant<BernoulliToggle, FixedCountToggle> mode = BernoulliToggle{};
  std::size_t replicas_per_chemical = 100;
  std::uint64_t seed = 0;
};

/// |db| * replicas records, ordered by chemical then replica. Each record
/// draws from its own stream seeded by (seed, chemical, replica), so any
/// subset can be regenerated independently. Throws std::invalid_argument for
/// a non-deduplicated database or an out-of-range mode parameter.
std::vector<VictimRecord> simulate_victims(const ChemicalDatabase& db, const PerturbationSpec& spec);

/// KDE over the per-victim toggle counts. Throws on an empty list.
KdeCurve perturbation_density(std::span<const VictimRecord> victims);

/// JSONL: {"true_chemical", "observed": "0101...", "toggled_indices", "rate"}.
void write_victims(std::span<const VictimRecord> victims, std::ostream& out);
void write_victims_file(std::span<const VictimRecord> victims, const std::string& path);
std::vector<VictimRecord> read_victims(std::istream& in);
std::vector<VictimRecord> read_victims_file(const std::string& path);

/// Checks `victim` against its source profile in `db`: observed differs from
/// the ideal profile exactly at toggled_indices. Throws DataError otherwise.
void validate_victim(const ChemicalDatabase& db, const VictimRecord& victim);

}  // namespace chemid
