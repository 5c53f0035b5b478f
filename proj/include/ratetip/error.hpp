#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ratetip {

enum class ErrorKind {
  InvalidArgument,
  NoRealEquilibria,
  DegenerateParameter,
  StepBudgetExceeded,
  Blowup,
  NonFiniteState,
  NoReturn,
  NewtonDiverged,
  SingularJacobian,
  ComplexMultipliers,
  NoBracket,
  NoCrossing,
  DegenerateEigenbasis,
};

std::string_view to_string(ErrorKind kind);

/// Numerical or contract failure raised by the library. Configuration
/// problems use ErrorKind::InvalidArgument; everything else is numerical.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ratetip
