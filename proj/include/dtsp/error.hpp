#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtsp {

/// Error categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  NonIntegerEndpoint,
  EmptySupport,
  ThresholdOutOfRange,
  NonPositiveShape,
  InvalidParameter,
  DomainError,
  OutOfSupport,
  BranchCrossing,
  EmptyData,
  DataOutOfSupport,
  InvalidInterval,
  ParseError,
  InvalidConfig,
  NumericalFailure,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonIntegerEndpoint: return "NonIntegerEndpoint";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::ThresholdOutOfRange: return "ThresholdOutOfRange";
    case ErrorKind::NonPositiveShape: return "NonPositiveShape";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::OutOfSupport: return "OutOfSupport";
    case ErrorKind::BranchCrossing: return "BranchCrossing";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::DataOutOfSupport: return "DataOutOfSupport";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dtsp
