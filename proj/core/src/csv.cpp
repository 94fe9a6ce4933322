#include "csv.hpp"

#include <charconv>
#include <cmath>

#include "multiphonic/error.hpp"

namespace mph::detail {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void CsvReader::expect_header(std::string_view expected) {
  std::string line;
  if (!std::getline(in_, line)) throw RowError(1, "missing header, expected '" + std::string(expected) + "'");
  row_ = 1;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (trim(line) != expected) {
    throw RowError(1, "header mismatch: expected '" + std::string(expected) + "', got '" +
                          std::string(trim(line)) + "'");
  }
}

std::optional<std::vector<std::string>> CsvReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++row_;
    if (trim(line).empty()) continue;
    return split_fields(line);
  }
  return std::nullopt;
}

double parse_double(std::string_view text, std::size_t row, std::string_view what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw RowError(row, std::string(what) + " is not a number: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace mph::detail
