#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtl {

enum class ErrorKind {
  InvalidRoot,
  NegativeValue,
  ShapeMismatch,
  NonFinite,
  OutOfRangeCube,
  NoParent,
  BadExponent,
  RootMismatch,
  ComplexityRefusal,
  ZeroMeasure,
  AtomicPowerUndefined,
  NotAPrincipalCube,
  OutsideRoot,
  BadKind,
  RegistryMiss,
  IoFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// All library failures are reported through this type; `kind()` is stable
/// and is what callers (and tests) should switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dtl
