#include "linesum/error.hpp"

namespace linesum {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MarginMismatch: return "MarginMismatch";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DegenerateDensity: return "DegenerateDensity";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NumericalBlowup: return "NumericalBlowup";
    case ErrorKind::IdentityViolation: return "IdentityViolation";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace linesum
