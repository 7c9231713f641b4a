#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace greyahp {

enum class ErrorCode {
  SeriesTooShort,
  NonPositiveData,
  SingularSystem,
  NumericOverflow,
  NoSaturation,
  DivergedFit,
  MissingJudgment,
  OutOfScale,
  NoConvergence,
  NotSquare,
  ReciprocityViolation,
  DegenerateCriterion,
  LabelMismatch,
  AllNonPositive,
  SharesDontSum,
  ParseError,
  NonPositiveValue,
  MissingCell,
  UnknownCriterion,
  InvalidArgument,
  BadRequest,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::NonPositiveData: return "NonPositiveData";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NumericOverflow: return "NumericOverflow";
    case ErrorCode::NoSaturation: return "NoSaturation";
    case ErrorCode::DivergedFit: return "DivergedFit";
    case ErrorCode::MissingJudgment: return "MissingJudgment";
    case ErrorCode::OutOfScale: return "OutOfScale";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::ReciprocityViolation: return "ReciprocityViolation";
    case ErrorCode::DegenerateCriterion: return "DegenerateCriterion";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::AllNonPositive: return "AllNonPositive";
    case ErrorCode::SharesDontSum: return "SharesDontSum";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::UnknownCriterion: return "UnknownCriterion";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

/// Every domain failure in the library is raised as an Error; the code is
/// what the CLI and the HTTP facade report back to callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace greyahp
