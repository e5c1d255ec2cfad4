#include "epsrb/error.hpp"

namespace epsrb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::DependentBasis: return "DependentBasis";
    case ErrorCode::InfeasibleFamily: return "InfeasibleFamily";
    case ErrorCode::ContainmentViolation: return "ContainmentViolation";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::CoercivityViolation: return "CoercivityViolation";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::EmptyBasis: return "EmptyBasis";
    case ErrorCode::HashMismatch: return "HashMismatch";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace epsrb
