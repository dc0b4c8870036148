#include "dracc/error.hpp"

namespace dracc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::InconsistentRow: return "InconsistentRow";
    case ErrorCode::EmptyArm: return "EmptyArm";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NoVariation: return "NoVariation";
    case ErrorCode::Separation: return "Separation";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MaskedAccess: return "MaskedAccess";
    case ErrorCode::NonPositivePropensity: return "NonPositivePropensity";
    case ErrorCode::FactorizationFailure: return "FactorizationFailure";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace dracc
