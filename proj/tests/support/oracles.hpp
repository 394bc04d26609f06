#pragma once

// Test-only reference implementations. Deliberately naive: they work on
// plain std::vector<int> bit lists so they share no code path with the
// packed-bit library implementations they check.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "chemid/ssx_matrix.hpp"

namespace chemid::oracle {

inline std::vector<int> bits(const SymptomProfile& p) {
  std::vector<int> out;
  const std::string s = p.to_string();
  for (char c : s) out.push_back(c == '1' ? 1 : 0);
  return out;
}

/// Names of the chemicals having a 1 wherever the query has a 1.
inline std::vector<std::string> brute_force_lookup(const ChemicalDatabase& db, const std::vector<int>& query) {
  std::vector<std::string> out;
  for (const auto& r : db.records()) {
    const auto b = bits(r.profile);
    bool ok = true;
    for (std::size_t i = 0; i < query.size(); ++i) {
      if (query[i] == 1 && b[i] == 0) ok = false;
    }
    if (ok) out.push_back(r.name);
  }
  return out;
}

/// Binomial coefficient by Pascal's triangle (exact for the sizes used).
inline double choose(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  std::vector<double> row(n + 1, 0.0);
  row[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i; j > 0; --j) row[j] += row[j - 1];
  }
  return row[k];
}

/// -sum p log p over a class histogram.
inline double entropy(const std::vector<std::size_t>& counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  if (n == 0.0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846); }

}  // namespace chemid::oracle
