#include "ratetip/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "ratetip/error.hpp"

namespace ratetip {

std::string_view to_string(GapMode mode) {
  return mode == GapMode::UnstableCoefficient ? "unstable_coefficient" : "stable_projection";
}

GapMode gap_mode_from_string(std::string_view name) {
  if (name == "unstable_coefficient") return GapMode::UnstableCoefficient;
  if (name == "stable_projection") return GapMode::StableProjection;
  throw Error(ErrorKind::InvalidArgument, "unknown gap mode '" + std::string(name) + "'");
}

std::string_view to_string(ShotStatus status) {
  switch (status) {
    case ShotStatus::Ok:
      return "ok";
    case ShotStatus::NoCrossing:
      return "no_crossing";
    case ShotStatus::Blowup:
      return "blowup";
  }
  return "unknown";
}

std::string_view to_string(FateClass fate) {
  switch (fate) {
    case FateClass::StrongTracking:
      return "strong_tracking";
    case FateClass::WeakTracking:
      return "weak_tracking";
    case FateClass::Diverged:
      return "diverged";
    case FateClass::Undecided:
      return "undecided";
  }
  return "unknown";
}

void validate(const PullbackRunConfig& run) {
  if (!(run.t_start < 0.0 && 0.0 < run.T))
    throw Error(ErrorKind::InvalidArgument, "pullback run needs t_start < 0 < T");
  if (!all_finite(run.z_init)) throw Error(ErrorKind::InvalidArgument, "z_init must be finite");
  validate(run.integ);
}

State auto_z_init(const NonautonomousSpec& spec) { return equilibria(spec.past_limit()).inner; }

CrossingRun pullback_crossings(const Field3& field, const PullbackRunConfig& run, double t_end) {
  return run_crossings(field, run.t_start, t_end, run.z_init, run.integ);
}

std::pair<CrossingRecord, std::size_t> pullback_final_crossing(const NonautonomousSpec& spec,
                                                               const PullbackRunConfig& run) {
  validate(spec);
  validate(run);
  const auto xs = pullback_crossings(make_nonautonomous_field(spec), run, run.T);
  if (xs.status != IntegratorStatus::Success) throw_integration_failure(xs.status, xs.t_end);
  if (xs.crossings.empty())
    throw Error(ErrorKind::NoCrossing, "no section crossing before T = " + std::to_string(run.T));
  return {xs.crossings.back(), xs.crossings.size()};
}

double gap_value(const SectionPoint& q, const PeriodicOrbit& orbit, GapMode mode) {
  const Vec2 d = q.vec() - orbit.gamma.vec();
  if (mode == GapMode::StableProjection) return dot(d, orbit.v_s) / dot(orbit.v_s, orbit.v_s);
  const Mat2 basis{{{orbit.v_s[0], orbit.v_u[0]}, {orbit.v_s[1], orbit.v_u[1]}}};
  const auto coeff = solve(basis, d, 1e-8);
  if (!coeff) throw Error(ErrorKind::DegenerateEigenbasis, "v_s and v_u are nearly parallel");
  return (*coeff)[1];
}

Shot shoot(const NonautonomousSpec& spec, const PullbackRunConfig& run) {
  Shot shot;
  shot.r = spec.rate;
  const auto xs = pullback_crossings(make_nonautonomous_field(spec), run, run.T);
  shot.n_crossings = xs.crossings.size();
  if (!xs.crossings.empty()) {
    shot.t_last = xs.crossings.back().t;
    shot.last = xs.crossings.back().point;
  }
  // Any integration failure (escape, budget, non-finite) means no usable final crossing.
  if (xs.status != IntegratorStatus::Success)
    shot.status = ShotStatus::Blowup;
  else if (xs.crossings.empty())
    shot.status = ShotStatus::NoCrossing;
  return shot;
}

GapResult to_gap(const Shot& shot, const PeriodicOrbit& orbit, GapMode mode) {
  GapResult g;
  g.r = shot.r;
  g.n_crossings = shot.n_crossings;
  g.t_last = shot.t_last;
  g.mode = mode;
  g.status = shot.status;
  g.eta = shot.status == ShotStatus::Ok ? gap_value(shot.last, orbit, mode) : std::nan("");
  return g;
}

GapResult gap(const NonautonomousSpec& spec, const PullbackRunConfig& run,
              const PeriodicOrbit& orbit, GapMode mode) {
  const auto [last, n] = pullback_final_crossing(spec, run);
  GapResult g;
  g.r = spec.rate;
  g.eta = gap_value(last.point, orbit, mode);
  g.n_crossings = n;
  g.t_last = last.t;
  g.mode = mode;
  return g;
}

std::vector<double> rate_grid(double r_min, double r_max, std::size_t samples) {
  if (!(r_min < r_max) || !(r_min > 0.0))
    throw Error(ErrorKind::InvalidArgument, "rate range needs 0 < r_min < r_max");
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "scan needs at least 2 samples");
  std::vector<double> rates(samples);
  const double step = (r_max - r_min) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) rates[i] = r_min + static_cast<double>(i) * step;
  rates.back() = r_max;
  return rates;
}

std::vector<Shot> shoot_rates_serial(const NonautonomousSpec& spec, const PullbackRunConfig& run,
                                     const std::vector<double>& rates) {
  std::vector<Shot> out;
  out.reserve(rates.size());
  for (double r : rates) {
    NonautonomousSpec at = spec;
    at.rate = r;
    out.push_back(shoot(at, run));
  }
  return out;
}

std::vector<Shot> shoot_rates(const NonautonomousSpec& spec, const PullbackRunConfig& run,
                              const std::vector<double>& rates, int jobs) {
  std::vector<Shot> out(rates.size());
  detail::parallel_for(rates.size(), jobs, [&](std::size_t i) {
    NonautonomousSpec at = spec;
    at.rate = rates[i];
    out[i] = shoot(at, run);
  });
  return out;
}

std::vector<GapResult> scan_eta(const NonautonomousSpec& spec, const PullbackRunConfig& run,
                                const PeriodicOrbit& orbit, double r_min, double r_max,
                                std::size_t samples, GapMode mode, int jobs) {
  validate(spec);
  validate(run);
  const auto shots = shoot_rates(spec, run, rate_grid(r_min, r_max, samples), jobs);
  std::vector<GapResult> rows;
  rows.reserve(shots.size());
  for (const auto& s : shots) rows.push_back(to_gap(s, orbit, mode));
  return rows;
}

namespace {

bool negative(double eta) { return eta < 0.0; }

bool sign_change(const GapResult& a, const GapResult& b) {
  return a.ok() && b.ok() && negative(a.eta) != negative(b.eta);
}

GapResult evaluate(const NonautonomousSpec& spec, const PullbackRunConfig& run,
                   const PeriodicOrbit& orbit, double r, GapMode mode) {
  NonautonomousSpec at = spec;
  at.rate = r;
  return to_gap(shoot(at, run), orbit, mode);
}

}  // namespace

std::size_t count_sign_changes(const std::vector<GapResult>& rows) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (rows[i].n_crossings == rows[i + 1].n_crossings && sign_change(rows[i], rows[i + 1]))
      ++count;
  return count;
}

std::vector<RateBracket> sign_change_brackets(const NonautonomousSpec& spec,
                                              const PullbackRunConfig& run,
                                              const PeriodicOrbit& orbit,
                                              const std::vector<GapResult>& rows,
                                              const RefineConfig& refine) {
  std::vector<RateBracket> out;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    GapResult a = rows[i];
    const GapResult& b = rows[i + 1];
    if (!sign_change(a, b)) continue;
    // Peel off constant-N pieces until the remainder ends at b.
    while (a.n_crossings != b.n_crossings) {
      GapResult lo = a, hi = b;
      bool failed = false;
      while (hi.r - lo.r > refine.tol_jump) {
        const double mid = 0.5 * (lo.r + hi.r);
        if (mid <= lo.r || mid >= hi.r) break;
        const GapResult m = evaluate(spec, run, orbit, mid, a.mode);
        if (!m.ok()) {
          failed = true;
          break;
        }
        (m.n_crossings == a.n_crossings ? lo : hi) = m;
      }
      if (failed) break;
      if (lo.r > a.r && sign_change(a, lo)) out.push_back({a, lo});
      a = hi;
    }
    if (a.n_crossings == b.n_crossings && sign_change(a, b)) out.push_back({a, b});
  }
  return out;
}

std::optional<CriticalRate> refine_bracket(const NonautonomousSpec& spec,
                                           const PullbackRunConfig& run,
                                           const PeriodicOrbit& orbit, const RateBracket& bracket,
                                           GapMode mode, const RefineConfig& refine) {
  GapResult lo = bracket.lo, hi = bracket.hi;
  if (lo.n_crossings != hi.n_crossings || !sign_change(lo, hi)) return std::nullopt;
  auto best = [&] { return std::fabs(lo.eta) <= std::fabs(hi.eta) ? lo : hi; };
  for (int iter = 0; iter < refine.max_iter; ++iter) {
    if (hi.r - lo.r < refine.tol_r && std::fabs(best().eta) < refine.tol_eta) break;
    const double mid = 0.5 * (lo.r + hi.r);
    if (mid <= lo.r || mid >= hi.r) break;
    const GapResult m = evaluate(spec, run, orbit, mid, mode);
    if (!m.ok() || m.n_crossings != lo.n_crossings) return std::nullopt;
    if (m.eta == 0.0) {
      lo = hi = m;
      break;
    }
    (negative(m.eta) == negative(lo.eta) ? lo : hi) = m;
  }
  const GapResult root = best();
  if (!(std::fabs(root.eta) < refine.tol_eta)) return std::nullopt;
  CriticalRate cr;
  cr.r_c = root.r;
  cr.eta_at_root = root.eta;
  cr.n_crossings = root.n_crossings;
  cr.bracket_lo = lo.r;
  cr.bracket_hi = hi.r;
  return cr;
}

ShadowResult shadow_after_horizon(const Field3& field, const PullbackRunConfig& run,
                                  const PeriodicOrbit& orbit, const ConfirmConfig& confirm) {
  ShadowResult out;
  const auto head = integrate<3>(field, run.t_start, run.T, run.z_init, run.integ);
  if (!head.ok()) {
    out.blowup = true;
    return out;
  }
  const double t_cap = run.T + static_cast<double>(confirm.max_returns) * confirm.max_flight;
  auto tail = run_crossings(field, run.T, t_cap, head.state, run.integ, Section{},
                            confirm.max_returns);
  out.blowup = tail.status != IntegratorStatus::Success;
  out.post_crossings = std::move(tail.crossings);
  for (const auto& c : out.post_crossings) {
    if (!(norm(c.point.vec() - orbit.gamma.vec()) < confirm.tube_eps)) break;
    ++out.shadow_periods;
  }
  out.confirmed = !out.blowup && out.shadow_periods >= confirm.shadow_periods;
  return out;
}

std::pair<bool, std::size_t> confirm_weak_tracking(const NonautonomousSpec& spec,
                                                   const PullbackRunConfig& run,
                                                   const PeriodicOrbit& orbit, double r_c,
                                                   const ConfirmConfig& confirm) {
  NonautonomousSpec at = spec;
  at.rate = r_c;
  const auto s = shadow_after_horizon(make_nonautonomous_field(at), run, orbit, confirm);
  return {s.confirmed, s.shadow_periods};
}

std::vector<CriticalRate> find_critical_rates(const NonautonomousSpec& spec,
                                              const PullbackRunConfig& run,
                                              const PeriodicOrbit& orbit,
                                              const std::vector<GapResult>& rows,
                                              const RefineConfig& refine,
                                              const ConfirmConfig& confirm, int jobs) {
  if (rows.empty()) return {};
  const GapMode mode = rows.front().mode;
  const auto brackets = sign_change_brackets(spec, run, orbit, rows, refine);
  std::vector<std::optional<CriticalRate>> refined(brackets.size());
  detail::parallel_for(brackets.size(), jobs, [&](std::size_t i) {
    auto root = refine_bracket(spec, run, orbit, brackets[i], mode, refine);
    if (root) {
      const auto [ok, periods] = confirm_weak_tracking(spec, run, orbit, root->r_c, confirm);
      root->confirmed = ok;
      root->shadow_periods = periods;
    }
    refined[i] = root;
  });
  std::vector<CriticalRate> roots;
  for (auto& r : refined)
    if (r) roots.push_back(*r);
  std::sort(roots.begin(), roots.end(),
            [](const CriticalRate& a, const CriticalRate& b) { return a.r_c < b.r_c; });
  return roots;
}

std::vector<CriticalRate> find_critical_rates(const NonautonomousSpec& spec,
                                              const PullbackRunConfig& run,
                                              const PeriodicOrbit& orbit, double r_min,
                                              double r_max, std::size_t samples, GapMode mode,
                                              const RefineConfig& refine,
                                              const ConfirmConfig& confirm, int jobs) {
  const auto rows = scan_eta(spec, run, orbit, r_min, r_max, samples, mode, jobs);
  return find_critical_rates(spec, run, orbit, rows, refine, confirm, jobs);
}

Fate classify_fate(const Field3& field, const PullbackRunConfig& run, double horizon,
                   const PeriodicOrbit& orbit, const ConfirmConfig& confirm) {
  PullbackRunConfig at = run;
  at.T = horizon;
  Fate fate;
  const auto head = integrate<3>(field, at.t_start, horizon, at.z_init, at.integ);
  if (!head.ok()) {
    fate.kind = FateClass::Diverged;
    fate.escape_time = head.t;
    return fate;
  }
  const auto s = shadow_after_horizon(field, at, orbit, confirm);
  fate.shadow_periods = s.shadow_periods;
  if (s.blowup) {
    fate.kind = FateClass::Diverged;
    fate.escape_time = s.post_crossings.empty() ? horizon : s.post_crossings.back().t;
    return fate;
  }
  if (s.confirmed) {
    fate.kind = FateClass::WeakTracking;
    return fate;
  }
  for (std::size_t i = 0; i < s.post_crossings.size(); ++i)
    for (std::size_t j = i + 1; j < s.post_crossings.size(); ++j)
      fate.band = std::fmax(fate.band, norm(s.post_crossings[i].point.vec() -
                                            s.post_crossings[j].point.vec()));
  fate.kind = fate.band > 10.0 * confirm.tube_eps ? FateClass::StrongTracking : FateClass::Undecided;
  return fate;
}

Fate classify_fate(const NonautonomousSpec& spec, const PullbackRunConfig& run, double horizon,
                   const PeriodicOrbit& orbit, const ConfirmConfig& confirm) {
  validate(spec);
  return classify_fate(make_nonautonomous_field(spec), run, horizon, orbit, confirm);
}

bool weak_tracking_feasible(double dim_past_attractor, double dim_stable_set) {
  if (!(dim_past_attractor >= 0.0) || !(dim_stable_set >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "dimensions must be non-negative");
  return dim_past_attractor <= dim_stable_set;
}

}  // namespace ratetip
