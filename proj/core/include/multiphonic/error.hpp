#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mph {

enum class ErrorCode {
  InvalidFrequency,
  InsufficientData,
  Configuration,
  InvalidSpec,
  Format,
  DegenerateFit,
  Io,
  Internal,
};

/// Stable kebab-case identifier used as the machine-readable prefix of CLI errors.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure in a line-oriented input; `row` is the 1-based line number.
class RowError : public Error {
 public:
  RowError(std::size_t row, const std::string& message)
      : Error(ErrorCode::Format, "row " + std::to_string(row) + ": " + message), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace mph
