#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdsurv {

//! Machine-readable error kinds raised by the library.
enum class ErrorCode {
  // data validation
  NonFiniteValue,
  InvalidValue,
  MissingTreatmentColumn,
  MissingColumn,
  EmptySide,
  InvalidHorizon,
  UnknownCovariate,
  // estimation
  EmptyInput,
  DegenerateData,
  NoOobTrees,
  ZeroSurvival,
  ZeroCensorSurvival,
  PanelNotOob,
  SingularDesign,
  DegenerateRunningVariable,
  InsufficientData,
  WeakIdentification,
  // usage / environment
  InvalidArgument,
  Io,
};

enum class ErrorCategory { Validation, Estimation, Usage };

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::NonFiniteValue: return "NonFiniteValue";
  case ErrorCode::InvalidValue: return "InvalidValue";
  case ErrorCode::MissingTreatmentColumn: return "MissingTreatmentColumn";
  case ErrorCode::MissingColumn: return "MissingColumn";
  case ErrorCode::EmptySide: return "EmptySide";
  case ErrorCode::InvalidHorizon: return "InvalidHorizon";
  case ErrorCode::UnknownCovariate: return "UnknownCovariate";
  case ErrorCode::EmptyInput: return "EmptyInput";
  case ErrorCode::DegenerateData: return "DegenerateData";
  case ErrorCode::NoOobTrees: return "NoOobTrees";
  case ErrorCode::ZeroSurvival: return "ZeroSurvival";
  case ErrorCode::ZeroCensorSurvival: return "ZeroCensorSurvival";
  case ErrorCode::PanelNotOob: return "PanelNotOob";
  case ErrorCode::SingularDesign: return "SingularDesign";
  case ErrorCode::DegenerateRunningVariable: return "DegenerateRunningVariable";
  case ErrorCode::InsufficientData: return "InsufficientData";
  case ErrorCode::WeakIdentification: return "WeakIdentification";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

inline ErrorCategory category_of(ErrorCode code) {
  switch (code) {
  case ErrorCode::NonFiniteValue:
  case ErrorCode::InvalidValue:
  case ErrorCode::MissingTreatmentColumn:
  case ErrorCode::MissingColumn:
  case ErrorCode::EmptySide:
  case ErrorCode::InvalidHorizon:
  case ErrorCode::UnknownCovariate:
  case ErrorCode::Io:
    return ErrorCategory::Validation;
  case ErrorCode::InvalidArgument:
    return ErrorCategory::Usage;
  default:
    return ErrorCategory::Estimation;
  }
}

inline std::string_view to_string(ErrorCategory c) {
  switch (c) {
  case ErrorCategory::Validation: return "validation";
  case ErrorCategory::Estimation: return "estimation";
  case ErrorCategory::Usage: return "usage";
  }
  return "unknown";
}

//! Exit status for a failure category: 1 estimation, 2 usage, 3 validation.
inline int exit_code(ErrorCategory c) {
  switch (c) {
  case ErrorCategory::Estimation: return 1;
  case ErrorCategory::Usage: return 2;
  case ErrorCategory::Validation: return 3;
  }
  return 1;
}

//! Exception carrying an ErrorCode. All library failures derive from this.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , code_(code)
    , detail_(message)
  {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  const std::string& detail() const noexcept { return detail_; }

private:
  ErrorCode code_;
  std::string detail_;
};

//! Raised when a validated row breaks a Unit invariant; carries the row index.
class RowError : public Error {
public:
  RowError(ErrorCode code, std::size_t row, const std::string& message)
    : Error(code, "row " + std::to_string(row) + ": " + message)
    , row_(row)
  {}

  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

} // namespace rdsurv
