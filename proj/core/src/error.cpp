#include "cachesim/error.hpp"

namespace cachesim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::GEOMETRY_ERROR: return "GEOMETRY_ERROR";
    case ErrorCode::MODE_CONFLICT: return "MODE_CONFLICT";
    case ErrorCode::RAGGED_TRACE: return "RAGGED_TRACE";
    case ErrorCode::TILE_TOO_LARGE: return "TILE_TOO_LARGE";
    case ErrorCode::BLOCK_MISMATCH: return "BLOCK_MISMATCH";
    case ErrorCode::SIZE_MISMATCH: return "SIZE_MISMATCH";
    case ErrorCode::OUT_OF_RANGE: return "OUT_OF_RANGE";
    case ErrorCode::PARSE_ERROR: return "PARSE_ERROR";
    case ErrorCode::VALIDATION_ERROR: return "VALIDATION_ERROR";
    case ErrorCode::IO_ERROR: return "IO_ERROR";
    case ErrorCode::METRIC_UNAVAILABLE: return "METRIC_UNAVAILABLE";
  }
  return "UNKNOWN";
}

SimError::SimError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool is_validation_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PARSE_ERROR:
    case ErrorCode::VALIDATION_ERROR:
    case ErrorCode::GEOMETRY_ERROR:
    case ErrorCode::MODE_CONFLICT:
    case ErrorCode::BLOCK_MISMATCH:
    case ErrorCode::SIZE_MISMATCH:
    case ErrorCode::TILE_TOO_LARGE:
      return true;
    default:
      return false;
  }
}

}  // namespace cachesim
