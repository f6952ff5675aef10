#pragma once

#include <stdexcept>
#include <string>

namespace freemult {

enum class ErrorCode {
  InvalidArgument,
  NotAvailable,
  AtomAtZero,
  QuadratureFailure,
  OutOfRange,
  OrderTooHigh,
  UnknownTag,
  ExponentBelowOne,
  NoBracket,
  DomainTooSmall,
  NonPositiveValue,
  RegimeMismatch,
  NotRegularlyVarying,
  AmbiguousRegime,
  MissingLimit,
  EigensolverFailure,
  TooFewSamples,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace freemult
