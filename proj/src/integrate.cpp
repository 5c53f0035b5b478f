#include "ratetip/integrate.hpp"

#include <string>

#include "ratetip/error.hpp"

namespace ratetip {

std::string_view to_string(IntegratorStatus status) {
  switch (status) {
    case IntegratorStatus::Success:
      return "ok";
    case IntegratorStatus::StepBudgetExceeded:
      return "step_budget_exceeded";
    case IntegratorStatus::Blowup:
      return "blowup";
    case IntegratorStatus::NonFiniteState:
      return "non_finite_state";
  }
  return "unknown";
}

void throw_integration_failure(IntegratorStatus status, double t) {
  const std::string where = " at t = " + std::to_string(t);
  switch (status) {
    case IntegratorStatus::StepBudgetExceeded:
      throw Error(ErrorKind::StepBudgetExceeded, "step budget exhausted" + where);
    case IntegratorStatus::Blowup:
      throw Error(ErrorKind::Blowup, "trajectory left the escape radius" + where);
    case IntegratorStatus::NonFiniteState:
    case IntegratorStatus::Success:
      break;
  }
  throw Error(ErrorKind::NonFiniteState, "non-finite state" + where);
}

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
    throw Error(ErrorKind::InvalidArgument, "integrator tolerances must be positive");
  if (!(cfg.h_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "h_max must be positive");
  if (cfg.max_steps <= 0) throw Error(ErrorKind::InvalidArgument, "max_steps must be positive");
  if (!(cfg.escape_radius > 0.0))
    throw Error(ErrorKind::InvalidArgument, "escape radius must be positive");
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return "InvalidArgument";
    case ErrorKind::NoRealEquilibria:
      return "NoRealEquilibria";
    case ErrorKind::DegenerateParameter:
      return "DegenerateParameter";
    case ErrorKind::StepBudgetExceeded:
      return "StepBudgetExceeded";
    case ErrorKind::Blowup:
      return "Blowup";
    case ErrorKind::NonFiniteState:
      return "NonFiniteState";
    case ErrorKind::NoReturn:
      return "NoReturn";
    case ErrorKind::NewtonDiverged:
      return "NewtonDiverged";
    case ErrorKind::SingularJacobian:
      return "SingularJacobian";
    case ErrorKind::ComplexMultipliers:
      return "ComplexMultipliers";
    case ErrorKind::NoBracket:
      return "NoBracket";
    case ErrorKind::NoCrossing:
      return "NoCrossing";
    case ErrorKind::DegenerateEigenbasis:
      return "DegenerateEigenbasis";
  }
  return "Unknown";
}

}  // namespace ratetip
