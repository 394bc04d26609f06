#include "chemid/ssx_matrix.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "chemid/error.hpp"
#include "chemid/random.hpp"

namespace chemid {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

// Minimal RFC 4180 reader: comma separated, optional double-quoted fields with
// "" escapes, LF or CRLF line endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record. Returns false at end of input. `line` is the
  // 1-based physical line on which the record started.
  bool next(std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    ++line_;
    line = line_;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    while (true) {
      if (c == EOF) {
        if (quoted) throw DataError("unterminated quoted field", line);
        fields.push_back(std::move(field));
        return true;
      }
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (ch == '\n') {
        fields.push_back(std::move(field));
        return true;
      } else if (ch == '\r' && in_.peek() == '\n') {
        // swallowed; the '\n' terminates the record
      } else if (ch == '"' && field.empty() && !after_quote) {
        quoted = true;
      } else if (after_quote) {
        throw DataError("unexpected character after closing quote", line, fields.size() + 1);
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

bool is_blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields.front().empty();
}

void write_field(std::ostream& out, const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

// ---------------------------------------------------------------------------
// SymptomProfile

SymptomProfile::SymptomProfile(std::size_t size) : size_(size), words_(word_count(size), 0) {}

SymptomProfile SymptomProfile::from_string(std::string_view bits) {
  SymptomProfile p(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      p.set(i);
    } else if (bits[i] != '0') {
      throw DataError("profile string contains '" + std::string(1, bits[i]) + "' at position " +
                      std::to_string(i));
    }
  }
  return p;
}

bool SymptomProfile::test(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("symptom index out of range");
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
}

void SymptomProfile::set(std::size_t i, bool value) {
  if (i >= size_) throw std::out_of_range("symptom index out of range");
  const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (value) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

void SymptomProfile::flip(std::size_t i) {
  if (i >= size_) throw std::out_of_range("symptom index out of range");
  words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits);
}

std::size_t SymptomProfile::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool SymptomProfile::contains_all(const SymptomProfile& query) const {
  if (query.size_ != size_) throw std::invalid_argument("profile length mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((query.words_[w] & ~words_[w]) != 0) return false;
  }
  return true;
}

SymptomProfile SymptomProfile::prefix(std::size_t n) const {
  if (n > size_) throw std::out_of_range("prefix longer than profile");
  SymptomProfile out(n);
  for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] = words_[w];
  if (n % kWordBits != 0) out.words_.back() &= (std::uint64_t{1} << (n % kWordBits)) - 1;
  return out;
}

std::string SymptomProfile::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

std::size_t SymptomProfileHash::operator()(const SymptomProfile& p) const noexcept {
  std::uint64_t h = mix64(p.size());
  for (auto w : p.words()) h = mix64(h ^ w);
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// ChemicalDatabase

ChemicalDatabase::ChemicalDatabase(std::vector<std::string> symptom_names,
                                   std::vector<ChemicalRecord> records, bool dedup_applied)
    : symptom_names_(std::move(symptom_names)),
      records_(std::move(records)),
      dedup_applied_(dedup_applied) {
  if (symptom_names_.empty()) throw DataError("database has no symptom columns");
  std::unordered_set<std::string> seen_symptoms;
  for (const auto& s : symptom_names_) {
    if (s.empty()) throw DataError("empty symptom name");
    if (!seen_symptoms.insert(s).second) throw DataError("duplicate symptom name '" + s + "'");
  }
  by_name_.reserve(records_.size());
  std::unordered_map<SymptomProfile, std::size_t, SymptomProfileHash> profiles;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.name.empty()) throw DataError("chemical " + std::to_string(i) + " has an empty name");
    if (r.profile.size() != symptom_names_.size()) {
      throw DataError("chemical '" + r.name + "' has " + std::to_string(r.profile.size()) +
                      " symptoms, expected " + std::to_string(symptom_names_.size()));
    }
    if (!by_name_.emplace(r.name, i).second) throw DataError("duplicate chemical name '" + r.name + "'");
    if (dedup_applied_) {
      auto [it, inserted] = profiles.emplace(r.profile, i);
      if (!inserted) {
        throw DataError("deduplicated database has identical profiles for '" + records_[it->second].name +
                        "' and '" + r.name + "'");
      }
    }
  }
}

std::optional<std::size_t> ChemicalDatabase::index_of(std::string_view chemical) const {
  auto it = by_name_.find(std::string(chemical));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t ChemicalDatabase::require_index(std::string_view chemical) const {
  if (auto i = index_of(chemical)) return *i;
  throw DataError("unknown chemical '" + std::string(chemical) + "'");
}

std::string ChemicalDatabase::content_hash() const {
  std::ostringstream os;
  save_database(*this, os);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// CSV persistence

ChemicalDatabase load_database(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!reader.next(fields, line)) throw DataError("empty input: missing header row", 1);
  if (fields.size() < 2) throw DataError("header row has no symptom columns", line);

  // The first header cell is the corner label; its content is ignored.
  std::vector<std::string> symptoms(fields.begin() + 1, fields.end());
  {
    std::unordered_set<std::string> seen;
    for (std::size_t c = 0; c < symptoms.size(); ++c) {
      if (symptoms[c].empty()) throw DataError("empty symptom name", line, c + 2);
      if (!seen.insert(symptoms[c]).second) {
        throw DataError("duplicate symptom name '" + symptoms[c] + "'", line, c + 2);
      }
    }
  }
  const std::size_t width = symptoms.size();

  std::vector<ChemicalRecord> records;
  std::unordered_map<std::string, std::size_t> names;
  while (reader.next(fields, line)) {
    if (is_blank_record(fields)) continue;
    if (fields.size() != width + 1) {
      throw DataError("expected " + std::to_string(width + 1) + " fields, found " + std::to_string(fields.size()),
                      line, fields.size() < width + 1 ? fields.size() + 1 : width + 2);
    }
    if (fields[0].empty()) throw DataError("empty chemical name", line, 1);
    if (auto [it, inserted] = names.emplace(fields[0], line); !inserted) {
      throw DataError("duplicate chemical name '" + fields[0] + "' (first seen on row " +
                          std::to_string(it->second) + ")",
                      line, 1);
    }
    SymptomProfile profile(width);
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& cell = fields[c + 1];
      if (cell == "1") {
        profile.set(c);
      } else if (cell != "0") {
        throw DataError("non-binary cell '" + cell + "'", line, c + 2);
      }
    }
    records.push_back({fields[0], std::move(profile)});
  }
  return ChemicalDatabase(std::move(symptoms), std::move(records), false);
}

ChemicalDatabase load_database_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open database file '" + path + "'");
  return load_database(in);
}

void save_database(const ChemicalDatabase& db, std::ostream& out) {
  for (const auto& s : db.symptom_names()) {
    out << ',';
    write_field(out, s);
  }
  out << '\n';
  for (const auto& r : db.records()) {
    write_field(out, r.name);
    for (std::size_t c = 0; c < db.symptom_count(); ++c) out << (r.profile.test(c) ? ",1" : ",0");
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing database CSV");
}

void save_database_file(const ChemicalDatabase& db, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_database(db, out);
}

// ---------------------------------------------------------------------------
// Deduplication and synthesis

std::pair<ChemicalDatabase, DedupReport> deduplicate(const ChemicalDatabase& db) {
  std::unordered_map<SymptomProfile, std::size_t, SymptomProfileHash> cluster_of;
  DedupReport report;
  std::vector<ChemicalRecord> kept;
  for (const auto& r : db.records()) {
    auto [it, inserted] = cluster_of.emplace(r.profile, report.clusters.size());
    if (inserted) {
      report.clusters.push_back({r.name, {r.name}});
      kept.push_back(r);
    } else {
      report.clusters[it->second].merged.push_back(r.name);
    }
  }
  report.unique_count = report.clusters.size();
  return {ChemicalDatabase(db.symptom_names(), std::move(kept), true), std::move(report)};
}

ChemicalDatabase generate_synthetic_database(std::size_t n_chemicals, std::size_t n_symptoms,
                                             double density, std::uint64_t seed) {
  if (n_chemicals == 0 || n_symptoms == 0) {
    throw std::invalid_argument("synthetic database needs at least one chemical and one symptom");
  }
  if (!(density > 0.0 && density < 1.0)) throw std::invalid_argument("density must lie in (0, 1)");
  if (n_symptoms < 64 && n_chemicals > (std::uint64_t{1} << n_symptoms)) {
    throw std::invalid_argument("cannot draw " + std::to_string(n_chemicals) + " distinct profiles over " +
                                std::to_string(n_symptoms) + " symptoms");
  }

  const int name_width = static_cast<int>(std::to_string(std::max(n_chemicals, n_symptoms) - 1).size());
  auto label = [name_width](const char* prefix, std::size_t i) {
    std::string digits = std::to_string(i);
    return prefix + std::string(static_cast<std::size_t>(name_width) - digits.size(), '0') + digits;
  };

  std::vector<std::string> symptoms;
  symptoms.reserve(n_symptoms);
  for (std::size_t s = 0; s < n_symptoms; ++s) symptoms.push_back(label("ssx_", s));

  // Budget: generous relative to the expected number of collisions even for
  // nearly exhaustive requests like 4 profiles over 2 bits.
  const std::size_t budget = 10000 * n_chemicals + 1000;
  Rng rng(derive_seed(seed, "synthetic-db"));
  std::unordered_set<SymptomProfile, SymptomProfileHash> seen;
  std::vector<ChemicalRecord> records;
  records.reserve(n_chemicals);
  std::size_t draws = 0;
  while (records.size() < n_chemicals) {
    if (draws++ == budget) {
      throw std::runtime_error("synthetic generation did not find " + std::to_string(n_chemicals) +
                               " distinct profiles within " + std::to_string(budget) + " draws");
    }
    SymptomProfile p(n_symptoms);
    for (std::size_t s = 0; s < n_symptoms; ++s) {
      if (rng.bernoulli(density)) p.set(s);
    }
    if (seen.insert(p).second) records.push_back({label("chem_", records.size()), std::move(p)});
  }
  return ChemicalDatabase(std::move(symptoms), std::move(records), true);
}

double bit_density(const ChemicalDatabase& db) {
  if (db.empty()) return 0.0;
  std::size_t ones = 0;
  for (const auto& r : db.records()) ones += r.profile.count();
  return static_cast<double>(ones) / static_cast<double>(db.size() * db.symptom_count());
}

}  // namespace chemid
