#pragma once

#include <stdexcept>
#include <string>

namespace mwc {

enum class ErrorCode {
  NonSymmetric,
  IndefiniteWeight,
  NotPSD,
  SelfLoop,
  DuplicateEdge,
  ZeroWeight,
  NodeOutOfRange,
  DimensionMismatch,
  DwellTooShort,
  EmptySchedule,
  UnknownGraph,
  SignInconsistentEdge,
  EmptyWindow,
  WindowsNotContiguous,
  IndexOutOfRange,
  NonOrthonormalPsi,
  HorizonNonPositive,
  HorizonBeyondSchedule,
  InvalidArgument,
  ParseError,
  ValidationError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::IndefiniteWeight: return "IndefiniteWeight";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::NodeOutOfRange: return "NodeOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DwellTooShort: return "DwellTooShort";
    case ErrorCode::EmptySchedule: return "EmptySchedule";
    case ErrorCode::UnknownGraph: return "UnknownGraph";
    case ErrorCode::SignInconsistentEdge: return "SignInconsistentEdge";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::WindowsNotContiguous: return "WindowsNotContiguous";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonOrthonormalPsi: return "NonOrthonormalPsi";
    case ErrorCode::HorizonNonPositive: return "HorizonNonPositive";
    case ErrorCode::HorizonBeyondSchedule: return "HorizonBeyondSchedule";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mwc
