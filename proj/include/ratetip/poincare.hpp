#pragma once

#include <cstddef>
#include <vector>

#include "ratetip/integrate.hpp"
#include "ratetip/system.hpp"

namespace ratetip {

/// Coordinates (u, v) = (x, z) on the section.
struct SectionPoint {
  double u = 0.0;
  double v = 0.0;

  Vec2 vec() const { return {u, v}; }
  static SectionPoint from(const Vec2& w) { return {w[0], w[1]}; }
  bool operator==(const SectionPoint&) const = default;
};

/// The half-plane {(x, x, z) : x <= 0}, crossed in the direction of
/// increasing g = x - y.
struct Section {
  double surface(const State& s) const { return s[0] - s[1]; }
  bool admits(const State& s) const { return s[0] <= 0.0; }
  /// dg/dt along the flow; positive at qualifying crossings.
  double normal_velocity(const State& f) const { return f[0] - f[1]; }
  SectionPoint project(const State& s) const { return {s[0], s[2]}; }
  State lift(const SectionPoint& q) const { return {q.u, q.u, q.v}; }

  EventSpec<3> event_spec(std::size_t stop_after = 0) const;
};

struct CrossingRecord {
  std::size_t index = 0;  ///< 1-based ordinal within the run
  double t = 0.0;
  SectionPoint point;
  State state{};
};

/// Crossings of the section along one integration run, with the run status.
struct CrossingRun {
  IntegratorStatus status = IntegratorStatus::Success;
  std::vector<CrossingRecord> crossings;
  double t_end = 0.0;
  State state_end{};
};

CrossingRun run_crossings(const Field3& field, double t0, double t1, const State& x0,
                          const IntegratorConfig& cfg, const Section& section = {},
                          std::size_t stop_after = 0);

/// Throws the integrator failure as an Error; otherwise returns every
/// qualifying crossing in [t0, t1].
std::vector<CrossingRecord> detect_crossings(const Field3& field, double t0, double t1,
                                             const State& x0, const IntegratorConfig& cfg,
                                             const Section& section = {});

struct ReturnMapOptions {
  double max_flight = 50.0;
  double fd_step = 1e-6;
  /// Fixed step used for the finite-difference evaluations, so that all
  /// perturbed trajectories share one smooth discretization.
  double fd_integration_step = 1e-3;
};

struct ReturnResult {
  SectionPoint point;
  double flight_time = 0.0;
};

ReturnResult return_map(const RosslerParams& p, const SectionPoint& q, const IntegratorConfig& cfg,
                        const ReturnMapOptions& opt = {});

/// Central-difference Jacobian of the return map in section coordinates.
Mat2 return_map_jacobian(const RosslerParams& p, const SectionPoint& q,
                         const IntegratorConfig& cfg, const ReturnMapOptions& opt = {});

/// det DP(q) from the flux identity det DP = exp(int div f dt) * gdot(q) / gdot(P(q)).
/// Resolves determinants far below finite-difference accuracy.
double return_map_flux_determinant(const RosslerParams& p, const SectionPoint& q,
                                   const IntegratorConfig& cfg, const ReturnMapOptions& opt = {});

}  // namespace ratetip
