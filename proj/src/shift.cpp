#include "ratetip/shift.hpp"

#include <cmath>
#include <string>

#include "ratetip/error.hpp"

namespace ratetip {

std::string_view to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::Tanh:
      return "tanh";
    case ShiftKind::PiecewiseLinear:
      return "piecewise_linear";
    case ShiftKind::Constant:
      return "constant";
  }
  return "unknown";
}

ShiftKind shift_kind_from_string(std::string_view name) {
  if (name == "tanh") return ShiftKind::Tanh;
  if (name == "piecewise_linear") return ShiftKind::PiecewiseLinear;
  if (name == "constant") return ShiftKind::Constant;
  throw Error(ErrorKind::InvalidArgument, "unknown shift kind '" + std::string(name) + "'");
}

ShiftProfile ShiftProfile::tanh(double lambda_minus, double lambda_plus, double delta) {
  return {ShiftKind::Tanh, lambda_minus, lambda_plus, delta};
}

ShiftProfile ShiftProfile::piecewise_linear(double lambda_minus, double lambda_plus, double delta) {
  return {ShiftKind::PiecewiseLinear, lambda_minus, lambda_plus, delta};
}

ShiftProfile ShiftProfile::constant(double value) {
  return {ShiftKind::Constant, value, value, 0.0};
}

void validate(const ShiftProfile& profile) {
  if (!std::isfinite(profile.lambda_minus) || !std::isfinite(profile.lambda_plus))
    throw Error(ErrorKind::InvalidArgument, "shift limits must be finite");
  if (profile.kind == ShiftKind::Constant) return;
  if (!(profile.lambda_minus < profile.lambda_plus))
    throw Error(ErrorKind::InvalidArgument, "shift requires lambda_minus < lambda_plus");
  if (profile.kind == ShiftKind::Tanh && !(profile.delta > 0.0 && profile.delta < profile.span()))
    throw Error(ErrorKind::InvalidArgument, "tanh shift requires 0 < delta < span");
  if (profile.kind == ShiftKind::PiecewiseLinear &&
      !(profile.delta > 0.0 && profile.delta < profile.span() / 2.0))
    throw Error(ErrorKind::InvalidArgument, "piecewise-linear shift requires 0 < delta < span/2");
}

double tau_threshold(const ShiftProfile& profile) {
  const double span = profile.span();
  if (!(span > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau needs a non-constant shift");
  if (!(profile.delta > 0.0) || !(profile.delta < span))
    throw Error(ErrorKind::InvalidArgument, "tau needs 0 < delta < span");
  return (std::log(span - profile.delta) - std::log(profile.delta)) / span;
}

double eval_shift(const ShiftProfile& profile, double s) {
  const double span = profile.span();
  switch (profile.kind) {
    case ShiftKind::Tanh:
      return 0.5 * span * (std::tanh(0.5 * span * s) + 1.0) + profile.lambda_minus;
    case ShiftKind::PiecewiseLinear: {
      const double tau = tau_threshold(profile);
      if (s < -tau) return profile.lambda_minus;
      if (s > tau) return profile.lambda_plus;
      return 0.5 * (profile.lambda_plus + profile.lambda_minus) + span / (2.0 * tau) * s;
    }
    case ShiftKind::Constant:
      return profile.lambda_plus;
  }
  return profile.lambda_plus;
}

double shift_derivative(const ShiftProfile& profile, double s) {
  const double span = profile.span();
  switch (profile.kind) {
    case ShiftKind::Tanh: {
      const double sech = 1.0 / std::cosh(0.5 * span * s);
      return 0.25 * span * span * sech * sech;
    }
    case ShiftKind::PiecewiseLinear: {
      // One-sided interior slope at the kinks.
      const double tau = tau_threshold(profile);
      if (s < -tau || s > tau) return 0.0;
      return span / (2.0 * tau);
    }
    case ShiftKind::Constant:
      return 0.0;
  }
  return 0.0;
}

}  // namespace ratetip
