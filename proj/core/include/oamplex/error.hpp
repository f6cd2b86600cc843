#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oamplex {

enum class ErrorCode {
  EmptyState,
  ZeroNorm,
  DuplicateIndex,
  InvalidMultiplier,
  InvalidBasis,
  InvalidDensityMatrix,
  BasisMismatch,
  NegativeWeight,
  WeightError,
  InvalidImperfection,
  BrightPortEmpty,
  InvalidGrid,
  EmptyBand,
  BasisTooSmall,
  InvalidExposure,
  IncompleteSet,
  ZeroExposure,
  DegenerateInput,
  NotPSD,
  SyntaxError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI's error record) can branch on it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace oamplex
