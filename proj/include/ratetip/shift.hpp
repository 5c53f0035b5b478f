#pragma once

#include <string_view>

namespace ratetip {

enum class ShiftKind { Tanh, PiecewiseLinear, Constant };

std::string_view to_string(ShiftKind kind);
ShiftKind shift_kind_from_string(std::string_view name);

/// Monotone parameter ramp from lambda_minus (s -> -inf) to lambda_plus
/// (s -> +inf), evaluated at shift-time s = r t. A Constant profile holds
/// lambda_plus for all s.
struct ShiftProfile {
  ShiftKind kind = ShiftKind::Tanh;
  double lambda_minus = -0.2;
  double lambda_plus = 0.2;
  double delta = 1e-3;

  static ShiftProfile tanh(double lambda_minus, double lambda_plus, double delta = 1e-3);
  static ShiftProfile piecewise_linear(double lambda_minus, double lambda_plus, double delta);
  static ShiftProfile constant(double value);

  double span() const { return lambda_plus - lambda_minus; }
};

/// Throws Error(InvalidArgument) when the profile breaks its invariants.
void validate(const ShiftProfile& profile);

double eval_shift(const ShiftProfile& profile, double s);

/// (ln(span - delta) - ln delta) / span: the shift-time at which the tanh
/// ramp is delta-close to its limits.
double tau_threshold(const ShiftProfile& profile);

double shift_derivative(const ShiftProfile& profile, double s);

}  // namespace ratetip
