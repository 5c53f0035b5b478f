#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ratetip/poincare.hpp"
#include "ratetip/upo.hpp"

namespace ratetip {

/// One trajectory standing in for the pullback attractor: integrate the
/// nonautonomous field from (t_start, z_init) up to T.
struct PullbackRunConfig {
  State z_init{-0.007, 0.035, -0.035};
  double t_start = -30.0;
  double T = 150.0;
  IntegratorConfig integ{};
};

void validate(const PullbackRunConfig& run);

/// Residual-checked past-limit equilibrium, the alternative to the default z_init.
State auto_z_init(const NonautonomousSpec& spec);

enum class GapMode {
  UnstableCoefficient,  ///< coefficient along v_u in the (v_s, v_u) basis
  StableProjection,     ///< <d, v_s> / |v_s|^2
};

std::string_view to_string(GapMode mode);
GapMode gap_mode_from_string(std::string_view name);

/// Outcome of one shooting run at a fixed rate.
enum class ShotStatus { Ok, NoCrossing, Blowup };
std::string_view to_string(ShotStatus status);

struct Shot {
  double r = 0.0;
  ShotStatus status = ShotStatus::Ok;
  std::size_t n_crossings = 0;
  double t_last = 0.0;
  SectionPoint last;  ///< final crossing with t <= T
};

struct GapResult {
  double r = 0.0;
  double eta = 0.0;
  std::size_t n_crossings = 0;
  double t_last = 0.0;
  GapMode mode = GapMode::UnstableCoefficient;
  ShotStatus status = ShotStatus::Ok;

  bool ok() const { return status == ShotStatus::Ok; }
};

struct CriticalRate {
  double r_c = 0.0;
  double eta_at_root = 0.0;
  std::size_t n_crossings = 0;
  bool confirmed = false;
  std::size_t shadow_periods = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

struct RefineConfig {
  double tol_r = 1e-9;
  double tol_eta = 1e-6;
  int max_iter = 200;
  /// Resolution used when locating a jump in the crossing count.
  double tol_jump = 1e-9;
};

struct ConfirmConfig {
  std::size_t shadow_periods = 3;
  double tube_eps = 0.05;
  std::size_t max_returns = 30;
  double max_flight = 50.0;
};

enum class FateClass { StrongTracking, WeakTracking, Diverged, Undecided };
std::string_view to_string(FateClass fate);

struct Fate {
  FateClass kind = FateClass::Undecided;
  std::size_t shadow_periods = 0;
  double escape_time = 0.0;  ///< Diverged only
  double band = 0.0;         ///< diameter of post-horizon crossings
};

/// Pullback trajectory and its section crossings up to t_end.
CrossingRun pullback_crossings(const Field3& field, const PullbackRunConfig& run, double t_end);

/// Last crossing with t <= T and the crossing count N. Throws NoCrossing or
/// the integration failure (Blowup etc.).
std::pair<CrossingRecord, std::size_t> pullback_final_crossing(const NonautonomousSpec& spec,
                                                               const PullbackRunConfig& run);

/// Gap of a section point relative to the orbit's fixed point and eigenbasis.
double gap_value(const SectionPoint& q, const PeriodicOrbit& orbit, GapMode mode);

/// Single shooting evaluation; never throws on numerical failure.
Shot shoot(const NonautonomousSpec& spec, const PullbackRunConfig& run);

GapResult to_gap(const Shot& shot, const PeriodicOrbit& orbit, GapMode mode);

/// Throws on integration failure or missing crossings.
GapResult gap(const NonautonomousSpec& spec, const PullbackRunConfig& run,
              const PeriodicOrbit& orbit, GapMode mode);

std::vector<double> rate_grid(double r_min, double r_max, std::size_t samples);

/// Shooting over a list of rates. The serial version is the reference; the
/// parallel one distributes rates over `jobs` OpenMP threads (0: runtime
/// default) and returns results in input order, identical to the reference.
std::vector<Shot> shoot_rates_serial(const NonautonomousSpec& spec, const PullbackRunConfig& run,
                                     const std::vector<double>& rates);
std::vector<Shot> shoot_rates(const NonautonomousSpec& spec, const PullbackRunConfig& run,
                              const std::vector<double>& rates, int jobs = 0);

std::vector<GapResult> scan_eta(const NonautonomousSpec& spec, const PullbackRunConfig& run,
                                const PeriodicOrbit& orbit, double r_min, double r_max,
                                std::size_t samples, GapMode mode, int jobs = 0);

/// Number of sign changes of eta between neighbouring rows that share a
/// crossing count.
std::size_t count_sign_changes(const std::vector<GapResult>& rows);

/// A sign-change bracket with constant crossing count at both ends.
struct RateBracket {
  GapResult lo;
  GapResult hi;
};

/// Brackets from a scan, splitting at crossing-count jumps so every bracket
/// has equal N at its endpoints.
std::vector<RateBracket> sign_change_brackets(const NonautonomousSpec& spec,
                                              const PullbackRunConfig& run,
                                              const PeriodicOrbit& orbit,
                                              const std::vector<GapResult>& rows,
                                              const RefineConfig& refine);

/// Bisection on a constant-N bracket. std::nullopt when the bracket hides a
/// crossing-count jump or eta cannot be driven below tol_eta.
std::optional<CriticalRate> refine_bracket(const NonautonomousSpec& spec,
                                           const PullbackRunConfig& run,
                                           const PeriodicOrbit& orbit, const RateBracket& bracket,
                                           GapMode mode, const RefineConfig& refine);

struct ShadowResult {
  bool confirmed = false;
  std::size_t shadow_periods = 0;
  std::vector<CrossingRecord> post_crossings;  ///< crossings after T
  bool blowup = false;
};

/// Continues the run past T for up to max_returns section returns and
/// counts the initial run of consecutive returns within tube_eps of gamma.
ShadowResult shadow_after_horizon(const Field3& field, const PullbackRunConfig& run,
                                  const PeriodicOrbit& orbit, const ConfirmConfig& confirm);

std::pair<bool, std::size_t> confirm_weak_tracking(const NonautonomousSpec& spec,
                                                   const PullbackRunConfig& run,
                                                   const PeriodicOrbit& orbit, double r_c,
                                                   const ConfirmConfig& confirm);

std::vector<CriticalRate> find_critical_rates(const NonautonomousSpec& spec,
                                              const PullbackRunConfig& run,
                                              const PeriodicOrbit& orbit, double r_min,
                                              double r_max, std::size_t samples, GapMode mode,
                                              const RefineConfig& refine,
                                              const ConfirmConfig& confirm, int jobs = 0);

/// Same as above on an existing scan (rows in increasing r, one mode).
std::vector<CriticalRate> find_critical_rates(const NonautonomousSpec& spec,
                                              const PullbackRunConfig& run,
                                              const PeriodicOrbit& orbit,
                                              const std::vector<GapResult>& rows,
                                              const RefineConfig& refine,
                                              const ConfirmConfig& confirm, int jobs = 0);

/// Fate of the pullback trajectory integrated to `horizon` and continued
/// for confirm.max_returns returns.
Fate classify_fate(const Field3& field, const PullbackRunConfig& run, double horizon,
                   const PeriodicOrbit& orbit, const ConfirmConfig& confirm);
Fate classify_fate(const NonautonomousSpec& spec, const PullbackRunConfig& run, double horizon,
                   const PeriodicOrbit& orbit, const ConfirmConfig& confirm);

/// Necessary dimension condition for weak tracking: dim(A-) <= dim(W^s(S+)).
bool weak_tracking_feasible(double dim_past_attractor, double dim_stable_set);

}  // namespace ratetip
