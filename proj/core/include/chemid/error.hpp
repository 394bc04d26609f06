#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace chemid {

/// Malformed or inconsistent input data (CSV, JSONL, model files).
///
/// When the problem is tied to a location in a tabular source, `row()` and
/// `column()` carry 1-based coordinates (row 1 is the header line).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}

  DataError(const std::string& what, std::size_t row, std::optional<std::size_t> column = std::nullopt)
      : std::runtime_error(format(what, row, column)), row_(row), column_(column) {}

  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t row, std::optional<std::size_t> column) {
    std::string out = "row " + std::to_string(row);
    if (column) out += ", column " + std::to_string(*column);
    return out + ": " + what;
  }

  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

}  // namespace chemid
