#pragma once

#include <stdexcept>
#include <string>

namespace colehopf {

enum class ErrorKind {
  DomainOrder,
  NotPowerOfTwo,
  LengthMismatch,
  AnchorOutOfRange,
  ShapeMismatch,
  Vacuum,
  NegativeDensity,
  ZeroDispersion,
  NonFinite,
  BlowUp,
  SpacingMismatch,
  NonPeriodicRamp,
  Config,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainOrder: return "domain-order";
    case ErrorKind::NotPowerOfTwo: return "not-power-of-two";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::AnchorOutOfRange: return "anchor-out-of-range";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::Vacuum: return "vacuum";
    case ErrorKind::NegativeDensity: return "negative-density";
    case ErrorKind::ZeroDispersion: return "zero-dispersion";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::SpacingMismatch: return "spacing-mismatch";
    case ErrorKind::NonPeriodicRamp: return "non-periodic-ramp";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace colehopf
