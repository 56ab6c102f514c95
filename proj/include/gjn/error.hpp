#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gjn {

enum class ErrorKind {
  SingularRouting,
  DeadStation,
  SingularBlock,
  NotPSD,
  NegativeStart,
  NoConvergence,
  EventOverflow,
  GridMismatch,
  TooFewSamples,
  InvalidArgument,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Every failure the library reports. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularRouting: return "SingularRouting";
    case ErrorKind::DeadStation: return "DeadStation";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NegativeStart: return "NegativeStart";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EventOverflow: return "EventOverflow";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

}  // namespace gjn
