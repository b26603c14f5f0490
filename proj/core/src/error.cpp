#include "nuqs/error.hpp"

namespace nuqs {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::NegativeMagnitude: return "NegativeMagnitude";
    case ErrorCode::InvalidMedium: return "InvalidMedium";
    case ErrorCode::NegativePhotonNumber: return "NegativePhotonNumber";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::IntegrationDidNotConverge: return "IntegrationDidNotConverge";
    case ErrorCode::BoundaryOptimum: return "BoundaryOptimum";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InsufficientColumn: return "InsufficientColumn";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BracketExcludesOptimum: return "BracketExcludesOptimum";
  }
  return "Unknown";
}

}  // namespace nuqs
