#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tvflow {

enum class ErrorCode {
  // stepfn
  NonSortedBreakpoints,
  LengthMismatch,
  InvalidDomain,
  NonFiniteValue,
  InfiniteMass,
  EmptyIntersection,
  InfiniteNorm,
  ModeMismatch,
  // prox
  NonpositiveStep,
  UnboundedProblem,
  NotConverged,
  // flow
  UnboundedData,
  OutOfHorizon,
  SignedData,
  NotCompactlySupported,
  // profiles
  NotUnimodal,
  BeyondExtinction,
  InvalidProfile,
  NonpositiveTolerance,
  // asymptotics
  AtOrPastExtinction,
  ZeroFunction,
  InvalidRateFunction,
  // sfde
  DirichletSignedAtoms,
  AtomOutsideDomain,
  UnsupportedConfiguration,
  // cli
  ParseError,
  ConfigError,
  UnknownKind,
  IoError,
};

/// Module that owns an error code, e.g. "prox" for NonpositiveStep.
std::string_view error_module(ErrorCode code);
std::string_view error_name(ErrorCode code);
/// "module.Name", as written into CLI error records.
std::string qualified_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tvflow
