// fnls: pseudospectral solvers for the nonlocal nonlinear Schrödinger equation
//   i u_t - lambda u_xx = zeta D^beta(|u|^{2 sigma} u)
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fnls {

enum class ErrorCode {
  NonEvenN,
  DegenerateInterval,
  NonFiniteInput,
  NonFiniteOutput,
  MismatchedGrids,
  ZeroProfile,
  InvalidRegime,
  InadmissibleExponent,
  ZeroDenominator,
  IndefiniteSymbol,
  NonexistenceRegime,
  SpeedTooLarge,
  NotConverged,
  Diverged,
  SeriesTooShort,
  BoundaryNotDecayed,
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  Io,
  ConfigInvalid,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonEvenN: return "NonEvenN";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
    case ErrorCode::MismatchedGrids: return "MismatchedGrids";
    case ErrorCode::ZeroProfile: return "ZeroProfile";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::InadmissibleExponent: return "InadmissibleExponent";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::IndefiniteSymbol: return "IndefiniteSymbol";
    case ErrorCode::NonexistenceRegime: return "NonexistenceRegime";
    case ErrorCode::SpeedTooLarge: return "SpeedTooLarge";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::BoundaryNotDecayed: return "BoundaryNotDecayed";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::Io: return "Io";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The code
/// identifies the error family; what() carries a human-readable reason.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fnls
