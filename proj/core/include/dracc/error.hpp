#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dracc {

enum class ErrorCode {
  InvalidArgument,
  MissingColumn,
  BadValue,
  InconsistentRow,
  EmptyArm,
  DegenerateSample,
  RankDeficient,
  TooFewRows,
  NoVariation,
  Separation,
  NotConverged,
  DimensionMismatch,
  MaskedAccess,
  NonPositivePropensity,
  FactorizationFailure,
  NoData,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the study loop in particular) can record it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dracc
