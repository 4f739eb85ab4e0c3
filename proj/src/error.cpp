#include "dtl/error.hpp"

namespace dtl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidRoot: return "InvalidRoot";
    case ErrorKind::NegativeValue: return "NegativeValue";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::OutOfRangeCube: return "OutOfRangeCube";
    case ErrorKind::NoParent: return "NoParent";
    case ErrorKind::BadExponent: return "BadExponent";
    case ErrorKind::RootMismatch: return "RootMismatch";
    case ErrorKind::ComplexityRefusal: return "ComplexityRefusal";
    case ErrorKind::ZeroMeasure: return "ZeroMeasure";
    case ErrorKind::AtomicPowerUndefined: return "AtomicPowerUndefined";
    case ErrorKind::NotAPrincipalCube: return "NotAPrincipalCube";
    case ErrorKind::OutsideRoot: return "OutsideRoot";
    case ErrorKind::BadKind: return "BadKind";
    case ErrorKind::RegistryMiss: return "RegistryMiss";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace dtl
