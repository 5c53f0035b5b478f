#include "ratetip/system.hpp"

#include <cmath>

#include "ratetip/error.hpp"

namespace ratetip {

void validate(const NonautonomousSpec& spec) {
  validate(spec.shift);
  if (!(spec.rate > 0.0) || !std::isfinite(spec.rate))
    throw Error(ErrorKind::InvalidArgument, "rate must be positive and finite");
  if (!std::isfinite(spec.b) || !std::isfinite(spec.c))
    throw Error(ErrorKind::InvalidArgument, "b and c must be finite");
}

State vector_field_frozen(const RosslerParams& p, const State& s) {
  const auto [x, y, z] = s;
  return {-y - z, x + p.a * y, p.b + z * (x - p.c)};
}

Mat3 jacobian_frozen(const RosslerParams& p, const State& s) {
  return {{{0.0, -1.0, -1.0}, {1.0, p.a, 0.0}, {s[2], 0.0, s[0] - p.c}}};
}

Equilibria equilibria(const RosslerParams& p) {
  if (p.a == 0.0) {
    // z (x - c) + b = 0 with x = 0 on the line y = -z.
    if (p.c == 0.0) throw Error(ErrorKind::DegenerateParameter, "a = 0 and c = 0");
    const double z = p.b / p.c;
    const State eq{0.0, -z, z};
    return {eq, eq, true};
  }
  const double disc = p.c * p.c - 4.0 * p.a * p.b;
  if (disc < 0.0) throw Error(ErrorKind::NoRealEquilibria, "c^2 - 4ab < 0");
  const double root = std::sqrt(disc);
  // Cancellation-free pair: zeta_inner * zeta_outer = b / a.
  const double q = 0.5 * (p.c + std::copysign(root, p.c));
  double zeta_outer = q / p.a;
  double zeta_inner = q != 0.0 ? p.b / q : p.c / (2.0 * p.a);
  if (std::fabs(zeta_inner) > std::fabs(zeta_outer)) std::swap(zeta_inner, zeta_outer);
  auto lift = [&](double zeta) { return State{zeta * p.a, -zeta, zeta}; };
  return {lift(zeta_inner), lift(zeta_outer), false};
}

State vector_field_nonautonomous(const NonautonomousSpec& spec, double t, const State& s) {
  const RosslerParams p{eval_shift(spec.shift, spec.rate * t), spec.b, spec.c};
  return vector_field_frozen(p, s);
}

Field3 make_frozen_field(const RosslerParams& p) {
  return [p](double, const State& s) { return vector_field_frozen(p, s); };
}

Field3 make_nonautonomous_field(const NonautonomousSpec& spec) {
  return [spec](double t, const State& s) { return vector_field_nonautonomous(spec, t, s); };
}

}  // namespace ratetip
