#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mph::detail {

/// Line reader for the plain comma-separated inputs: no quoting, CR stripped,
/// blank lines skipped. Row numbers are 1-based file lines (header = 1).
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Throws RowError unless the first line matches `expected` exactly.
  void expect_header(std::string_view expected);

  /// Next non-blank row split on commas, fields trimmed.
  std::optional<std::vector<std::string>> next();

  std::size_t row() const noexcept { return row_; }

 private:
  std::istream& in_;
  std::size_t row_ = 0;
};

std::vector<std::string> split_fields(std::string_view line);

/// Whole-field strict parse; throws RowError naming `what`.
double parse_double(std::string_view text, std::size_t row, std::string_view what);

}  // namespace mph::detail
