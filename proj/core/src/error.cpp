#include "sgspec/error.hpp"

namespace sgspec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TailNotIntegrable: return "TailNotIntegrable";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NearZeroZ: return "NearZeroZ";
    case ErrorCode::InconsistentJost: return "InconsistentJost";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::NonPositiveDerivative: return "NonPositiveDerivative";
    case ErrorCode::ZeroOnContour: return "ZeroOnContour";
    case ErrorCode::SubdivisionLimit: return "SubdivisionLimit";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sgspec
