#pragma once

// Dormand-Prince 5(4) integration with the standard continuous extension,
// uniform dense sampling and surface-crossing events.
//
// The integrator never throws on numerical trouble: divergence and budget
// exhaustion are reported through IntegratorStatus so that parameter sweeps
// can classify tipped trajectories instead of aborting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "ratetip/error.hpp"
#include "ratetip/linalg.hpp"

namespace ratetip {

struct IntegratorConfig {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 0.0;  ///< <= 0 selects the initial step automatically
  double h_max = 0.1;
  std::int64_t max_steps = 100'000'000;
  double escape_radius = 1e4;  ///< max-norm beyond which the run is flagged Blowup
  double fixed_step = 0.0;     ///< > 0 disables error control and uses this step
};

void validate(const IntegratorConfig& cfg);

enum class IntegratorStatus { Success, StepBudgetExceeded, Blowup, NonFiniteState };

std::string_view to_string(IntegratorStatus status);

/// Raises the Error matching a non-success status reached at time t.
[[noreturn]] void throw_integration_failure(IntegratorStatus status, double t);

enum class EventDirection { Rising, Falling, Both };

template <std::size_t N>
struct EventSpec {
  std::function<double(double, const Vec<N>&)> surface;
  EventDirection direction = EventDirection::Both;
  /// Crossings failing the constraint are ignored. Empty means accept all.
  std::function<bool(double, const Vec<N>&)> constraint;
  /// Stop the run at the n-th accepted event (0: never stop).
  std::size_t stop_after = 0;
};

template <std::size_t N>
struct Sample {
  double t;
  Vec<N> state;
};

struct OutputOptions {
  double sample_dt = 0.0;  ///< > 0 records dense samples on t0 + k * sample_dt
  bool record_steps = false;
};

template <std::size_t N>
struct IntegrationResult {
  IntegratorStatus status = IntegratorStatus::Success;
  double t = 0.0;  ///< time reached (event time when stopped by an event)
  Vec<N> state{};
  bool stopped_by_event = false;
  std::vector<Sample<N>> samples;
  std::vector<Sample<N>> events;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;

  bool ok() const { return status == IntegratorStatus::Success; }
};

/// Tolerances used to localize events on the dense output.
inline constexpr double kEventSurfaceTol = 1e-10;
inline constexpr double kEventTimeTol = 1e-12;

namespace detail {

// Dormand & Prince (1980) tableau; dense-output weights from Hairer's DOPRI5.
struct DP45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <std::size_t N>
struct Step {
  Vec<N> y1{};
  Vec<N> k7{};
  Vec<N> err{};
  std::array<Vec<N>, 5> dense{};
};

template <std::size_t N, class F>
Step<N> dp_step(F& f, double t, const Vec<N>& y, const Vec<N>& k1, double h) {
  using T = DP45;
  Vec<N> tmp{};
  auto stage = [&](auto&& combine) {
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * combine(i);
    return tmp;
  };
  const Vec<N> k2 = f(t + T::c2 * h, stage([&](std::size_t i) { return T::a21 * k1[i]; }));
  const Vec<N> k3 =
      f(t + T::c3 * h, stage([&](std::size_t i) { return T::a31 * k1[i] + T::a32 * k2[i]; }));
  const Vec<N> k4 = f(t + T::c4 * h, stage([&](std::size_t i) {
                        return T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i];
                      }));
  const Vec<N> k5 = f(t + T::c5 * h, stage([&](std::size_t i) {
                        return T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i];
                      }));
  const Vec<N> k6 = f(t + h, stage([&](std::size_t i) {
                        return T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] +
                               T::a65 * k5[i];
                      }));
  Step<N> out;
  out.y1 = stage([&](std::size_t i) {
    return T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] + T::a75 * k5[i] + T::a76 * k6[i];
  });
  out.k7 = f(t + h, out.y1);
  for (std::size_t i = 0; i < N; ++i) {
    out.err[i] = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                      T::e6 * k6[i] + T::e7 * out.k7[i]);
    const double ydiff = out.y1[i] - y[i];
    const double bspl = h * k1[i] - ydiff;
    out.dense[0][i] = y[i];
    out.dense[1][i] = ydiff;
    out.dense[2][i] = bspl;
    out.dense[3][i] = ydiff - h * out.k7[i] - bspl;
    out.dense[4][i] = h * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] + T::d5 * k5[i] +
                           T::d6 * k6[i] + T::d7 * out.k7[i]);
  }
  return out;
}

/// Continuous extension on the accepted step, theta in [0, 1].
template <std::size_t N>
Vec<N> interpolate(const std::array<Vec<N>, 5>& r, double theta) {
  const double theta1 = 1.0 - theta;
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i)
    out[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
  return out;
}

template <std::size_t N>
double scaled_error(const Vec<N>& err, const Vec<N>& y0, const Vec<N>& y1,
                    const IntegratorConfig& cfg) {
  double e = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::fmax(std::fabs(y0[i]), std::fabs(y1[i]));
    e = std::fmax(e, std::fabs(err[i]) / sc);
  }
  return e;
}

// Hairer's starting-step heuristic.
template <std::size_t N, class F>
double initial_step(F& f, double t0, const Vec<N>& y0, const Vec<N>& f0,
                    const IntegratorConfig& cfg, double span) {
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::fabs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / N);
  d1 = std::sqrt(d1 / N);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::fmin(h0, std::fmin(cfg.h_max, span));
  Vec<N> y1{};
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
  const Vec<N> f1 = f(t0 + h0, y1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::fabs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / N) / h0;
  const double dmax = std::fmax(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::fmax(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::fmin(std::fmin(100.0 * h0, h1), std::fmin(cfg.h_max, span));
}

inline bool crosses(EventDirection dir, double g0, double g1) {
  const bool rising = g0 < 0.0 && g1 >= 0.0;
  const bool falling = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case EventDirection::Rising:
      return rising;
    case EventDirection::Falling:
      return falling;
    case EventDirection::Both:
      return rising || falling;
  }
  return false;
}

}  // namespace detail

/// Integrates x' = field(t, x) from t0 to t1 (t0 < t1). When `events` is
/// given, qualifying crossings are localized on the continuous extension to
/// |surface| < kEventSurfaceTol and a time bracket below kEventTimeTol.
template <std::size_t N, class F>
IntegrationResult<N> integrate(F&& field, double t0, double t1, const Vec<N>& x0,
                               const IntegratorConfig& cfg, const EventSpec<N>* events = nullptr,
                               const OutputOptions& out = {}) {
  if (t1 < t0) throw Error(ErrorKind::InvalidArgument, "integration needs t0 <= t1");
  IntegrationResult<N> res;
  res.t = t0;
  res.state = x0;
  if (!all_finite(x0)) {
    res.status = IntegratorStatus::NonFiniteState;
    return res;
  }
  if (out.record_steps) res.samples.push_back({t0, x0});
  std::int64_t next_sample = 0;
  // Samples on the uniform grid inside [ta, t_end] of the step [ta, ta + h].
  auto emit_samples = [&](double ta, double h, const std::array<Vec<N>, 5>& dense, double t_end,
                          bool include_end) {
    if (!(out.sample_dt > 0.0)) return;
    while (true) {
      const double ts = t0 + static_cast<double>(next_sample) * out.sample_dt;
      if (ts > t_end || (ts == t_end && !include_end) || ts > t1) break;
      const double theta = std::clamp((ts - ta) / h, 0.0, 1.0);
      res.samples.push_back({ts, detail::interpolate<N>(dense, theta)});
      ++next_sample;
    }
  };
  if (out.sample_dt > 0.0) {
    res.samples.push_back({t0, x0});
    next_sample = 1;
  }

  const double span = t1 - t0;
  if (!(span > 0.0)) return res;

  Vec<N> y = x0;
  double t = t0;
  Vec<N> k1 = field(t, y);
  const bool fixed = cfg.fixed_step > 0.0;
  double h = fixed ? cfg.fixed_step
                   : (cfg.h_init > 0.0 ? std::fmin(cfg.h_init, cfg.h_max)
                                       : detail::initial_step<N>(field, t0, y, k1, cfg, span));
  double g_prev = 0.0;
  if (events) g_prev = events->surface(t, y);
  bool last_rejected = false;

  while (t < t1) {
    if (res.accepted + res.rejected >= cfg.max_steps) {
      res.status = IntegratorStatus::StepBudgetExceeded;
      break;
    }
    bool last = false;
    if (fixed ? t + h >= t1 - 1e-12 * span : t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    auto step = detail::dp_step<N>(field, t, y, k1, h);
    if (!all_finite(step.y1) || !all_finite(step.k7)) {
      if (fixed || h < 1e-14 * std::fmax(1.0, std::fabs(t))) {
        res.status = IntegratorStatus::NonFiniteState;
        break;
      }
      h *= 0.25;
      ++res.rejected;
      last_rejected = true;
      continue;
    }
    double fac = 1.0;
    if (!fixed) {
      const double err = detail::scaled_error<N>(step.err, y, step.y1, cfg);
      if (!std::isfinite(err)) {
        h *= 0.25;
        ++res.rejected;
        last_rejected = true;
        continue;
      }
      fac = err == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
      if (err > 1.0) {
        h *= std::fmin(fac, 1.0);
        ++res.rejected;
        last_rejected = true;
        if (h < 1e-14 * std::fmax(1.0, std::fabs(t))) {
          res.status = IntegratorStatus::NonFiniteState;
          break;
        }
        continue;
      }
      if (last_rejected) fac = std::fmin(fac, 1.0);
    }
    ++res.accepted;
    last_rejected = false;
    const double t_next = last ? t1 : t + h;

    bool stop = false;
    if (events) {
      const double g_next = events->surface(t_next, step.y1);
      if (detail::crosses(events->direction, g_prev, g_next)) {
        const auto g_theta = [&](double theta) {
          return events->surface(t + theta * h, detail::interpolate<N>(step.dense, theta));
        };
        // Converge to (near) machine precision: crossing coordinates are
        // differenced downstream, so a loose bracket would show up as noise.
        std::uintmax_t iters = 200;
        const double theta_tol = std::fmin(kEventTimeTol / h, 1e-15);
        auto tol = [theta_tol](double a, double b) { return std::fabs(b - a) <= theta_tol; };
        double theta = 1.0;
        if (g_next != 0.0) {
          const auto [lo, hi] =
              boost::math::tools::toms748_solve(g_theta, 0.0, 1.0, g_prev, g_next, tol, iters);
          theta = std::fabs(g_theta(lo)) <= std::fabs(g_theta(hi)) ? lo : hi;
        }
        const double te = t + theta * h;
        const Vec<N> xe = theta == 1.0 ? step.y1 : detail::interpolate<N>(step.dense, theta);
        if (!events->constraint || events->constraint(te, xe)) {
          res.events.push_back({te, xe});
          if (events->stop_after > 0 && res.events.size() >= events->stop_after) {
            emit_samples(t, h, step.dense, te, true);
            res.t = te;
            res.state = xe;
            res.stopped_by_event = true;
            stop = true;
          }
        }
      }
      g_prev = g_next;
    }
    if (stop) return res;

    emit_samples(t, h, step.dense, t_next, last);
    t = t_next;
    y = step.y1;
    k1 = step.k7;
    res.t = t;
    res.state = y;
    if (out.record_steps) res.samples.push_back({t, y});
    if (max_norm(y) > cfg.escape_radius) {
      res.status = IntegratorStatus::Blowup;
      break;
    }
    if (!fixed) h = std::fmin(h * fac, cfg.h_max);
  }
  return res;
}

template <std::size_t N, class F>
IntegrationResult<N> integrate_with_events(F&& field, double t0, double t1, const Vec<N>& x0,
                                           const IntegratorConfig& cfg, const EventSpec<N>& ev,
                                           const OutputOptions& out = {}) {
  return integrate<N>(std::forward<F>(field), t0, t1, x0, cfg, &ev, out);
}

}  // namespace ratetip
