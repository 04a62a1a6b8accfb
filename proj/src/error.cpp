#include "ptsol/error.hpp"

namespace ptsol {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InfeasibleAmplitude: return "InfeasibleAmplitude";
    case ErrorCode::UnderDetermined: return "UnderDetermined";
    case ErrorCode::OverDetermined: return "OverDetermined";
    case ErrorCode::KappaZero: return "KappaZero";
    case ErrorCode::NonLocalizable: return "NonLocalizable";
    case ErrorCode::InconsistentParameters: return "InconsistentParameters";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StepUnstable: return "StepUnstable";
    case ErrorCode::NonConvergedStep: return "NonConvergedStep";
  }
  return "Unknown";
}

bool is_configuration_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::StepUnstable:
    case ErrorCode::NonConvergedStep:
      return false;
    default:
      return true;
  }
}

}  // namespace ptsol
