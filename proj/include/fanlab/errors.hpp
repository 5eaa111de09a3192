#ifndef FANLAB_ERRORS_HPP_
#define FANLAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fanlab {

enum class ErrorCode {
  OutOfDomain,
  OutOfRange,
  OutOfImage,
  AlphabetMismatch,
  WindowTooShort,
  TooShort,
  NotInvertible,
  UnknownName,
  LengthMismatch,
  WindowMismatch,
  SeamViolation,
  ConstraintViolation,
  BudgetExceeded,
  WitnessNotFound,
  InfeasibleTarget,
  NotApplicable,
  NotCompatible,
  ParseError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::OutOfImage: return "OutOfImage";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::SeamViolation: return "SeamViolation";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::WitnessNotFound: return "WitnessNotFound";
    case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NotCompatible: return "NotCompatible";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// All library failures throw this; `code` identifies the contract that was
/// violated, `what()` carries context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace fanlab

#endif  // FANLAB_ERRORS_HPP_
