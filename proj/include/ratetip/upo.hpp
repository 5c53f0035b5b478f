#pragma once

#include <vector>

#include "ratetip/poincare.hpp"

namespace ratetip {

/// Period-one orbit as a fixed point gamma of the section return map, with
/// the Floquet data of the return-map Jacobian at gamma.
struct PeriodicOrbit {
  RosslerParams params;
  SectionPoint gamma;
  double period = 0.0;
  double lambda_s = 0.0;  ///< smaller-modulus multiplier
  double lambda_u = 0.0;  ///< larger-modulus multiplier
  Vec2 v_s{};             ///< unit eigenvectors, first nonzero component positive
  Vec2 v_u{};
  Mat2 jacobian{};        ///< finite-difference DP(gamma)
  double flux_det = 0.0;  ///< det DP(gamma) from the flux identity
  double residual = 0.0;  ///< |P(gamma) - gamma|
  int iterations = 0;

  bool is_saddle() const;
};

struct RecurrenceOptions {
  State start{1.0, 1.0, 0.0};
  double transient = 200.0;
  double duration = 2000.0;
};

/// Crossing whose successor lies closest to it, from a long frozen run.
SectionPoint seed_guess_from_recurrence(const RosslerParams& p, const IntegratorConfig& cfg,
                                        const RecurrenceOptions& opt = {});

/// Distance between the returned seed and its successor; diagnostic twin of
/// seed_guess_from_recurrence.
double recurrence_gap(const RosslerParams& p, const IntegratorConfig& cfg,
                      const RecurrenceOptions& opt = {});

struct NewtonOptions {
  int max_iter = 50;
  double tol = 1e-9;
  int max_halvings = 5;
  double singular_det = 1e-12;
  ReturnMapOptions map{};
};

PeriodicOrbit find_fixed_point(const RosslerParams& p, const SectionPoint& guess,
                               const IntegratorConfig& cfg, const NewtonOptions& opt = {});

/// Real eigen-decomposition of a 2x2 matrix; throws ComplexMultipliers for
/// a complex pair. Returned as {(lambda_small, v_small), (lambda_large, v_large)}.
struct Eigen2 {
  double lambda_small = 0.0;
  double lambda_large = 0.0;
  Vec2 v_small{};
  Vec2 v_large{};
};
Eigen2 eigen_decompose(const Mat2& m);

/// Follows the period-one orbit across `a_values` (in order), seeding each
/// Newton solve with the previous gamma.
std::vector<PeriodicOrbit> continue_orbit(double b, double c, const std::vector<double>& a_values,
                                          const IntegratorConfig& cfg,
                                          const NewtonOptions& opt = {});

struct PeriodDoublingOptions {
  double a_step = 0.005;
  double a_tol = 1e-7;
};

/// Parameter at which the dominant real multiplier of the period-one orbit
/// crosses -1, by continuation then bisection on a.
double locate_period_doubling(double b, double c, double a_lo, double a_hi,
                              const IntegratorConfig& cfg, const PeriodDoublingOptions& pd = {},
                              const NewtonOptions& opt = {});

}  // namespace ratetip
