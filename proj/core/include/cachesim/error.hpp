#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cachesim {

enum class ErrorCode {
  GEOMETRY_ERROR,
  MODE_CONFLICT,
  RAGGED_TRACE,
  TILE_TOO_LARGE,
  BLOCK_MISMATCH,
  SIZE_MISMATCH,
  OUT_OF_RANGE,
  PARSE_ERROR,
  VALIDATION_ERROR,
  IO_ERROR,
  METRIC_UNAVAILABLE,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library reports carries one of the codes above so the
// CLI can map it to an exit status without string matching.
class SimError : public std::runtime_error {
 public:
  SimError(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse and validation failures; the CLI exits with status 2 for these.
bool is_validation_failure(ErrorCode code) noexcept;

}  // namespace cachesim
