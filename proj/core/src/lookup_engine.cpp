#include "chemid/lookup_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace chemid {

namespace {

void check_width(const ChemicalDatabase& db, const SymptomProfile& query) {
  if (query.size() != db.symptom_count()) {
    throw std::invalid_argument("query has " + std::to_string(query.size()) + " symptoms, database has " +
                                std::to_string(db.symptom_count()));
  }
}

}  // namespace

std::vector<std::size_t> lookup_indices(const ChemicalDatabase& db, const SymptomProfile& query) {
  check_width(db, query);
  std::vector<std::size_t> out;
  const auto& records = db.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].profile.contains_all(query)) out.push_back(i);
  }
  return out;
}

CandidateList lookup(const ChemicalDatabase& db, const SymptomProfile& query) {
  CandidateList out;
  out.query_popcount = query.count();
  for (auto i : lookup_indices(db, query)) out.names.push_back(db[i].name);
  return out;
}

bool lookup_hit(const ChemicalDatabase& db, const VictimRecord& victim) {
  const auto& truth = db[db.require_index(victim.true_chemical)];
  check_width(db, victim.observed);
  return truth.profile.contains_all(victim.observed);
}

double binomial_model_sum(unsigned n, double p) {
  // Accumulate C(n,i) p^i (1-p)^(n-i) with the coefficient updated in place.
  double sum = 0.0;
  double coeff = 1.0;
  for (unsigned i = 1; i <= n; ++i) {
    coeff = coeff * static_cast<double>(n - i + 1) / static_cast<double>(i);
    sum += coeff * std::pow(p, i) * std::pow(1.0 - p, n - i);
  }
  return 1.0 - sum;
}

double binomial_model(unsigned n) {
  const double closed = std::ldexp(1.0, -static_cast<int>(n));
  const double expanded = binomial_model_sum(n, 0.5);
  if (std::abs(closed - expanded) > 1e-12) {
    throw std::logic_error("binomial model: closed form and explicit sum disagree at n = " + std::to_string(n));
  }
  return closed;
}

double exact_success_probability(const ChemicalDatabase& db, std::string_view chemical, std::size_t n) {
  const std::size_t width = db.symptom_count();
  if (n > width) throw std::invalid_argument("toggle count exceeds symptom count");
  const std::size_t k = db[db.require_index(chemical)].profile.count();
  if (n > k) return 0.0;
  double p = 1.0;
  for (std::size_t j = 0; j < n; ++j) p *= static_cast<double>(k - j) / static_cast<double>(width - j);
  return p;
}

}  // namespace chemid
