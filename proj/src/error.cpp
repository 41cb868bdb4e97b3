#include "tvflow/error.hpp"

namespace tvflow {

std::string_view error_module(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSortedBreakpoints:
    case ErrorCode::LengthMismatch:
    case ErrorCode::InvalidDomain:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::InfiniteMass:
    case ErrorCode::EmptyIntersection:
    case ErrorCode::InfiniteNorm:
    case ErrorCode::ModeMismatch:
      return "stepfn";
    case ErrorCode::NonpositiveStep:
    case ErrorCode::UnboundedProblem:
    case ErrorCode::NotConverged:
      return "prox";
    case ErrorCode::UnboundedData:
    case ErrorCode::OutOfHorizon:
    case ErrorCode::SignedData:
    case ErrorCode::NotCompactlySupported:
      return "flow";
    case ErrorCode::NotUnimodal:
    case ErrorCode::BeyondExtinction:
    case ErrorCode::InvalidProfile:
    case ErrorCode::NonpositiveTolerance:
      return "profiles";
    case ErrorCode::AtOrPastExtinction:
    case ErrorCode::ZeroFunction:
    case ErrorCode::InvalidRateFunction:
      return "asymptotics";
    case ErrorCode::DirichletSignedAtoms:
    case ErrorCode::AtomOutsideDomain:
    case ErrorCode::UnsupportedConfiguration:
      return "sfde";
    case ErrorCode::ParseError:
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownKind:
    case ErrorCode::IoError:
      return "cli";
  }
  return "unknown";
}

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSortedBreakpoints: return "NonSortedBreakpoints";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InfiniteMass: return "InfiniteMass";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::InfiniteNorm: return "InfiniteNorm";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::NonpositiveStep: return "NonpositiveStep";
    case ErrorCode::UnboundedProblem: return "UnboundedProblem";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::UnboundedData: return "UnboundedData";
    case ErrorCode::OutOfHorizon: return "OutOfHorizon";
    case ErrorCode::SignedData: return "SignedData";
    case ErrorCode::NotCompactlySupported: return "NotCompactlySupported";
    case ErrorCode::NotUnimodal: return "NotUnimodal";
    case ErrorCode::BeyondExtinction: return "BeyondExtinction";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::NonpositiveTolerance: return "NonpositiveTolerance";
    case ErrorCode::AtOrPastExtinction: return "AtOrPastExtinction";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::InvalidRateFunction: return "InvalidRateFunction";
    case ErrorCode::DirichletSignedAtoms: return "DirichletSignedAtoms";
    case ErrorCode::AtomOutsideDomain: return "AtomOutsideDomain";
    case ErrorCode::UnsupportedConfiguration: return "UnsupportedConfiguration";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string qualified_name(ErrorCode code) {
  std::string out(error_module(code));
  out += '.';
  out += error_name(code);
  return out;
}

}  // namespace tvflow
