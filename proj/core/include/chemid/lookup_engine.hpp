#pragma once

// Presence-only subset lookup in the style of WISER's substance ID support,
// and closed-form models of its hit rate under perturbation.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chemid/ssx_matrix.hpp"
#include "chemid/victim_sim.hpp"

namespace chemid {

struct CandidateList {
  std::vector<std::string> names;  ///< Database order.
  std::size_t query_popcount = 0;

  friend bool operator==(const CandidateList&, const CandidateList&) = default;
};

/// Chemicals whose profile has a 1 wherever `query` has a 1. Zeros in the
/// query never constrain. Throws std::invalid_argument on a width mismatch.
CandidateList lookup(const ChemicalDatabase& db, const SymptomProfile& query);

/// Same selection as lookup() but returns record indices.
std::vector<std::size_t> lookup_indices(const ChemicalDatabase& db, const SymptomProfile& query);

/// True iff the victim's true chemical survives lookup(db, victim.observed).
/// Throws DataError for a chemical missing from `db`.
bool lookup_hit(const ChemicalDatabase& db, const VictimRecord& victim);

/// Hit probability when exactly n symptoms are altered and each alteration
/// excludes the chemical with probability 1/2: 1 / 2^n. The unsimplified
/// binomial sum is evaluated alongside and must agree to 1e-12.
double binomial_model(unsigned n);

/// 1 - sum_{i=1..n} C(n,i) p^i (1-p)^(n-i).
double binomial_model_sum(unsigned n, double p = 0.5);

/// Exact probability that n distinct uniformly chosen toggles all land on
/// 1-bits of the chemical's profile: C(k, n) / C(S, n) with k its popcount.
double exact_success_probability(const ChemicalDatabase& db, std::string_view chemical, std::size_t n);

}  // namespace chemid
