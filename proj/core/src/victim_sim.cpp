#include "chemid/victim_sim.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "chemid/error.hpp"
#include "chemid/random.hpp"

namespace chemid {

namespace {

using json = nlohmann::json;

std::vector<std::size_t> draw_bernoulli(Rng& rng, std::size_t width, double rate) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < width; ++s) {
    if (rng.bernoulli(rate)) out.push_back(s);
  }
  return out;
}

// Partial Fisher-Yates: the first `count` slots become a uniform sample
// without replacement.
std::vector<std::size_t> draw_fixed(Rng& rng, std::size_t width, std::size_t count) {
  std::vector<std::size_t> pool(width);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(width - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::vector<VictimRecord> simulate_victims(const ChemicalDatabase& db, const PerturbationSpec& spec) {
  if (!db.dedup_applied()) throw std::invalid_argument("victims must be simulated from a deduplicated database");
  if (spec.replicas_per_chemical == 0) throw std::invalid_argument("replicas_per_chemical must be positive");
  const std::size_t width = db.symptom_count();

  double nominal = 0.0;
  if (const auto* b = std::get_if<BernoulliToggle>(&spec.mode)) {
    if (!(b->rate >= 0.0 && b->rate <= 1.0)) throw std::invalid_argument("toggle rate must lie in [0, 1]");
    nominal = b->rate;
  } else {
    const auto& f = std::get<FixedCountToggle>(spec.mode);
    if (f.count > width) {
      throw std::invalid_argument("fixed toggle count " + std::to_string(f.count) + " exceeds symptom count " +
                                  std::to_string(width));
    }
    nominal = static_cast<double>(f.count) / static_cast<double>(width);
  }

  std::vector<VictimRecord> out;
  out.reserve(db.size() * spec.replicas_per_chemical);
  for (std::size_t c = 0; c < db.size(); ++c) {
    const auto& source = db[c];
    for (std::size_t r = 0; r < spec.replicas_per_chemical; ++r) {
      Rng rng(combine_seeds({spec.seed, c, r}));
      VictimRecord v;
      v.true_chemical = source.name;
      v.rate = nominal;
      if (const auto* b = std::get_if<BernoulliToggle>(&spec.mode)) {
        v.toggled_indices = draw_bernoulli(rng, width, b->rate);
      } else {
        v.toggled_indices = draw_fixed(rng, width, std::get<FixedCountToggle>(spec.mode).count);
      }
      v.observed = source.profile;
      for (auto i : v.toggled_indices) v.observed.flip(i);
      out.push_back(std::move(v));
    }
  }
  return out;
}

KdeCurve perturbation_density(std::span<const VictimRecord> victims) {
  if (victims.empty()) throw std::invalid_argument("perturbation density of an empty victim set");
  std::vector<double> counts;
  counts.reserve(victims.size());
  for (const auto& v : victims) counts.push_back(static_cast<double>(v.toggled_indices.size()));
  return estimate_kde(counts);
}

void write_victims(std::span<const VictimRecord> victims, std::ostream& out) {
  for (const auto& v : victims) {
    json j;
    j["true_chemical"] = v.true_chemical;
    j["observed"] = v.observed.to_string();
    j["toggled_indices"] = v.toggled_indices;
    j["rate"] = v.rate;
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("failed writing victims");
}

void write_victims_file(std::span<const VictimRecord> victims, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_victims(victims, out);
}

std::vector<VictimRecord> read_victims(std::istream& in) {
  std::vector<VictimRecord> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    try {
      const json j = json::parse(line);
      VictimRecord v;
      v.true_chemical = j.at("true_chemical").get<std::string>();
      v.observed = SymptomProfile::from_string(j.at("observed").get<std::string>());
      v.toggled_indices = j.at("toggled_indices").get<std::vector<std::size_t>>();
      v.rate = j.at("rate").get<double>();
      out.push_back(std::move(v));
    } catch (const json::exception& e) {
      throw DataError(std::string("bad victim record: ") + e.what(), row);
    } catch (const DataError& e) {
      throw DataError(e.what(), row);
    }
  }
  return out;
}

std::vector<VictimRecord> read_victims_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open victims file '" + path + "'");
  return read_victims(in);
}

void validate_victim(const ChemicalDatabase& db, const VictimRecord& victim) {
  const auto& ideal = db[db.require_index(victim.true_chemical)].profile;
  if (victim.observed.size() != ideal.size()) throw DataError("victim profile width differs from database");
  std::vector<std::size_t> diff;
  for (std::size_t i = 0; i < ideal.size(); ++i) {
    if (ideal.test(i) != victim.observed.test(i)) diff.push_back(i);
  }
  if (diff != victim.toggled_indices) {
    throw DataError("victim of '" + victim.true_chemical + "' does not differ from its profile at toggled_indices");
  }
}

}  // namespace chemid
