#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace renyi {

enum class ErrorKind {
  NonFiniteIntegrand,
  DivergentIntegral,
  OutsideSupport,
  NotDifferentiable,
  NotNormalizable,
  ZeroMass,
  SupportMismatch,
  DegenerateParameters,
  PreconditionViolated,
  BudgetExhausted,
  InvalidArgument,
  ParseError,
};

inline constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorKind::DivergentIntegral: return "DivergentIntegral";
    case ErrorKind::OutsideSupport: return "OutsideSupport";
    case ErrorKind::NotDifferentiable: return "NotDifferentiable";
    case ErrorKind::NotNormalizable: return "NotNormalizable";
    case ErrorKind::ZeroMass: return "ZeroMass";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::DegenerateParameters: return "DegenerateParameters";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// that callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace renyi
