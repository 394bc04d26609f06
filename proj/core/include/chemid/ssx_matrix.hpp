#pragma once

// Chemical x signs/symptoms (SSx) binary matrix: profiles, the chemical
// database, CSV persistence, deduplication and synthetic generation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chemid {

/// Fixed-width vector of presence/absence flags, packed 64 per word.
///
/// Bits beyond size() in the last word are always zero, so word-wise
/// comparisons and popcounts need no masking.
class SymptomProfile {
 public:
  SymptomProfile() = default;
  explicit SymptomProfile(std::size_t size);

  /// Parses a string of '0'/'1' characters. Throws DataError otherwise.
  static SymptomProfile from_string(std::string_view bits);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const;
  void set(std::size_t i, bool value = true);
  void flip(std::size_t i);

  /// Number of set bits.
  std::size_t count() const noexcept;

  /// True when every bit set in `query` is also set here.
  bool contains_all(const SymptomProfile& query) const;

  /// First `n` flags as a new profile.
  SymptomProfile prefix(std::size_t n) const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::string to_string() const;

  friend bool operator==(const SymptomProfile&, const SymptomProfile&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct SymptomProfileHash {
  std::size_t operator()(const SymptomProfile& p) const noexcept;
};

struct ChemicalRecord {
  std::string name;
  SymptomProfile profile;
};

/// Immutable after construction; safe to share between threads.
class ChemicalDatabase {
 public:
  ChemicalDatabase() = default;

  /// Validates every invariant (unique non-empty names and symptom labels,
  /// profile widths, distinct profiles when `dedup_applied`). Throws DataError.
  ChemicalDatabase(std::vector<std::string> symptom_names, std::vector<ChemicalRecord> records,
                   bool dedup_applied);

  std::size_t symptom_count() const noexcept { return symptom_names_.size(); }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  bool dedup_applied() const noexcept { return dedup_applied_; }

  const std::vector<std::string>& symptom_names() const noexcept { return symptom_names_; }
  const std::vector<ChemicalRecord>& records() const noexcept { return records_; }
  const ChemicalRecord& operator[](std::size_t i) const { return records_.at(i); }

  std::optional<std::size_t> index_of(std::string_view chemical) const;

  /// Like index_of, but throws DataError for unknown names.
  std::size_t require_index(std::string_view chemical) const;

  /// Hex FNV-1a digest of the canonical CSV serialisation.
  std::string content_hash() const;

 private:
  std::vector<std::string> symptom_names_;
  std::vector<ChemicalRecord> records_;
  bool dedup_applied_ = false;
  std::unordered_map<std::string, std::size_t> by_name_;
};

struct DedupCluster {
  std::string representative;
  std::vector<std::string> merged;  ///< Includes the representative first.
};

struct DedupReport {
  std::vector<DedupCluster> clusters;
  std::size_t unique_count = 0;
};

/// Reads the header + rows CSV layout. Rows are `name,b1,...,bS` with every
/// cell literally "0" or "1". Quoted fields (RFC 4180) are accepted so names
/// like "1,1,1-Trichloroethane" survive. Throws DataError with coordinates.
ChemicalDatabase load_database(std::istream& in);
ChemicalDatabase load_database_file(const std::string& path);

/// Writes the same layout back; load_database(save_database(db)) == db.
void save_database(const ChemicalDatabase& db, std::ostream& out);
void save_database_file(const ChemicalDatabase& db, const std::string& path);

/// Keeps the first record (input order) of every distinct profile.
std::pair<ChemicalDatabase, DedupReport> deduplicate(const ChemicalDatabase& db);

/// Random database of `n_chemicals` pairwise-distinct profiles, each bit set
/// with probability `density`. Throws std::invalid_argument when distinctness
/// is impossible or density is outside (0, 1), and std::runtime_error when the
/// retry budget runs out.
ChemicalDatabase generate_synthetic_database(std::size_t n_chemicals, std::size_t n_symptoms,
                                             double density, std::uint64_t seed);

/// Mean fraction of set bits over all records.
double bit_density(const ChemicalDatabase& db);

}  // namespace chemid
