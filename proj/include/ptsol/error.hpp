#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptsol {

enum class ErrorCode {
  InfeasibleAmplitude,
  UnderDetermined,
  OverDetermined,
  KappaZero,
  NonLocalizable,
  InconsistentParameters,
  InvalidArgument,
  ConfigError,
  NoConvergence,
  StepUnstable,
  NonConvergedStep,
};

std::string_view to_string(ErrorCode code);

// True for failures caused by the requested configuration (as opposed to a
// numerical breakdown on a valid configuration).
bool is_configuration_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ptsol
