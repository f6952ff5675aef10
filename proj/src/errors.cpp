#include "freemult/errors.hpp"

namespace freemult {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotAvailable: return "NotAvailable";
    case ErrorCode::AtomAtZero: return "AtomAtZero";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::ExponentBelowOne: return "ExponentBelowOne";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::NotRegularlyVarying: return "NotRegularlyVarying";
    case ErrorCode::AmbiguousRegime: return "AmbiguousRegime";
    case ErrorCode::MissingLimit: return "MissingLimit";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace freemult
