#pragma once

#include <functional>
#include <utility>

#include "ratetip/linalg.hpp"
#include "ratetip/shift.hpp"

namespace ratetip {

using State = Vec3;

/// Right-hand side of a (possibly nonautonomous) three-dimensional flow.
using Field3 = std::function<State(double t, const State& x)>;

struct RosslerParams {
  double a = 0.2;
  double b = 0.2;
  double c = 5.7;
};

/// Roessler system with `a` driven by shift(rate * t).
struct NonautonomousSpec {
  double b = 0.2;
  double c = 5.7;
  ShiftProfile shift{};
  double rate = 1.0;

  /// Frozen parameters at the past (lambda_minus) or future (lambda_plus) limit.
  RosslerParams past_limit() const { return {shift.lambda_minus, b, c}; }
  RosslerParams future_limit() const { return {shift.lambda_plus, b, c}; }
};

void validate(const NonautonomousSpec& spec);

State vector_field_frozen(const RosslerParams& p, const State& s);
Mat3 jacobian_frozen(const RosslerParams& p, const State& s);

/// Divergence of the frozen field, a + x - c.
inline double divergence_frozen(const RosslerParams& p, const State& s) { return p.a + s[0] - p.c; }

struct Equilibria {
  State inner;  ///< smaller |zeta|; the one undergoing the Hopf bifurcation
  State outer;
  bool degenerate = false;  ///< a == 0: only `inner` is meaningful
};

/// Equilibria zeta * (a, -1, 1) with zeta = (c -+ sqrt(c^2 - 4ab)) / (2a).
/// For a == 0 the single equilibrium (0, -b/c, b/c) is returned in `inner`.
Equilibria equilibria(const RosslerParams& p);

State vector_field_nonautonomous(const NonautonomousSpec& spec, double t, const State& s);

Field3 make_frozen_field(const RosslerParams& p);
Field3 make_nonautonomous_field(const NonautonomousSpec& spec);

}  // namespace ratetip
