#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sgspec {

enum class ErrorCode {
  InvalidArgument,
  TailNotIntegrable,
  StepFailure,
  NearZeroZ,
  InconsistentJost,
  GridTooCoarse,
  HypothesisNotMet,
  NotAnEigenvalue,
  NonPositiveDerivative,
  ZeroOnContour,
  SubdivisionLimit,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sgspec
