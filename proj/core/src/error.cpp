#include "multiphonic/error.hpp"

namespace mph {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidFrequency: return "invalid-frequency";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::Configuration:    return "configuration";
    case ErrorCode::InvalidSpec:      return "invalid-spec";
    case ErrorCode::Format:           return "format";
    case ErrorCode::DegenerateFit:    return "degenerate-fit";
    case ErrorCode::Io:               return "io";
    case ErrorCode::Internal:         return "internal";
  }
  return "internal";
}

}  // namespace mph
