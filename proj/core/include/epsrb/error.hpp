#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epsrb {

/// Failure categories raised by the library. Every throwing path uses
/// epsrb::Error with one of these codes so callers (the CLI in particular)
/// can map failures onto exit codes without parsing messages.
enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonSymmetric,
  NotPositiveDefinite,
  SingularGram,
  NonFinite,
  ZeroVector,
  BracketFailure,
  LinearSolveFailure,
  MaxIterations,
  DependentBasis,
  InfeasibleFamily,
  ContainmentViolation,
  OutOfDomain,
  CoercivityViolation,
  EmptyGrid,
  EmptyBasis,
  HashMismatch,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace epsrb
