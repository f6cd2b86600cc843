#include "oamplex/error.hpp"

namespace oamplex {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyState: return "EmptyState";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::InvalidMultiplier: return "InvalidMultiplier";
    case ErrorCode::InvalidBasis: return "InvalidBasis";
    case ErrorCode::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::WeightError: return "WeightError";
    case ErrorCode::InvalidImperfection: return "InvalidImperfection";
    case ErrorCode::BrightPortEmpty: return "BrightPortEmpty";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::BasisTooSmall: return "BasisTooSmall";
    case ErrorCode::InvalidExposure: return "InvalidExposure";
    case ErrorCode::IncompleteSet: return "IncompleteSet";
    case ErrorCode::ZeroExposure: return "ZeroExposure";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace oamplex
