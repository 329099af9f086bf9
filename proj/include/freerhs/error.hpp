#pragma once

#include <stdexcept>
#include <string>

namespace freerhs {

enum class ErrorCode {
  KindRegionMismatch,
  StepSizeUnderflow,
  ToleranceNotMet,
  NonFiniteIntegrand,
  LimitDiverges,
  NoConvergence,
  OnRealAxis,
  WrongRegion,
  NonPositiveEnergy,
  SingularEndpoint,
  UnboundedSymbol,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::KindRegionMismatch: return "KindRegionMismatch";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::LimitDiverges: return "LimitDiverges";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OnRealAxis: return "OnRealAxis";
    case ErrorCode::WrongRegion: return "WrongRegion";
    case ErrorCode::NonPositiveEnergy: return "NonPositiveEnergy";
    case ErrorCode::SingularEndpoint: return "SingularEndpoint";
    case ErrorCode::UnboundedSymbol: return "UnboundedSymbol";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without parsing messages.
class SpectralError : public std::runtime_error {
 public:
  SpectralError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when an adaptive quadrature stops short of its tolerance.
class ToleranceError : public SpectralError {
 public:
  ToleranceError(const std::string& what, double achieved)
      : SpectralError(ErrorCode::ToleranceNotMet, what), achieved_(achieved) {}

  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace freerhs
