#include "ratetip/poincare.hpp"

#include <cmath>
#include <string>

#include "ratetip/error.hpp"

namespace ratetip {

namespace {

IntegratorConfig fixed_step_config(const IntegratorConfig& cfg, double h) {
  IntegratorConfig out = cfg;
  out.fixed_step = h;
  out.max_steps = std::max<std::int64_t>(cfg.max_steps, 1);
  return out;
}

}  // namespace

EventSpec<3> Section::event_spec(std::size_t stop_after) const {
  EventSpec<3> ev;
  ev.surface = [sec = *this](double, const State& s) { return sec.surface(s); };
  ev.constraint = [sec = *this](double, const State& s) { return sec.admits(s); };
  ev.direction = EventDirection::Rising;
  ev.stop_after = stop_after;
  return ev;
}

CrossingRun run_crossings(const Field3& field, double t0, double t1, const State& x0,
                          const IntegratorConfig& cfg, const Section& section,
                          std::size_t stop_after) {
  const auto ev = section.event_spec(stop_after);
  const auto res = integrate_with_events<3>(field, t0, t1, x0, cfg, ev);
  CrossingRun run;
  run.status = res.status;
  run.t_end = res.t;
  run.state_end = res.state;
  run.crossings.reserve(res.events.size());
  for (std::size_t i = 0; i < res.events.size(); ++i) {
    const auto& e = res.events[i];
    run.crossings.push_back({i + 1, e.t, section.project(e.state), e.state});
  }
  return run;
}

std::vector<CrossingRecord> detect_crossings(const Field3& field, double t0, double t1,
                                             const State& x0, const IntegratorConfig& cfg,
                                             const Section& section) {
  auto run = run_crossings(field, t0, t1, x0, cfg, section);
  if (run.status != IntegratorStatus::Success) throw_integration_failure(run.status, run.t_end);
  return std::move(run.crossings);
}

ReturnResult return_map(const RosslerParams& p, const SectionPoint& q, const IntegratorConfig& cfg,
                        const ReturnMapOptions& opt) {
  const Section section;
  const auto run =
      run_crossings(make_frozen_field(p), 0.0, opt.max_flight, section.lift(q), cfg, section, 1);
  if (run.status != IntegratorStatus::Success)
    throw Error(ErrorKind::NoReturn, "trajectory failed before returning (" +
                                         std::string(to_string(run.status)) + ")");
  if (run.crossings.empty())
    throw Error(ErrorKind::NoReturn, "no section return within flight time " +
                                         std::to_string(opt.max_flight));
  return {run.crossings.front().point, run.crossings.front().t};
}

Mat2 return_map_jacobian(const RosslerParams& p, const SectionPoint& q, const IntegratorConfig& cfg,
                         const ReturnMapOptions& opt) {
  const double h = opt.fd_step;
  const IntegratorConfig fd_cfg =
      opt.fd_integration_step > 0.0 ? fixed_step_config(cfg, opt.fd_integration_step) : cfg;
  Mat2 jac{};
  for (int col = 0; col < 2; ++col) {
    SectionPoint plus = q, minus = q;
    (col == 0 ? plus.u : plus.v) += h;
    (col == 0 ? minus.u : minus.v) -= h;
    const auto fp = return_map(p, plus, fd_cfg, opt).point;
    const auto fm = return_map(p, minus, fd_cfg, opt).point;
    jac[0][col] = (fp.u - fm.u) / (2.0 * h);
    jac[1][col] = (fp.v - fm.v) / (2.0 * h);
  }
  for (const auto& row : jac)
    for (double v : row)
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteState, "non-finite Jacobian entry");
  return jac;
}

double return_map_flux_determinant(const RosslerParams& p, const SectionPoint& q,
                                   const IntegratorConfig& cfg, const ReturnMapOptions& opt) {
  const Section section;
  // Augment the flow with w' = div f to accumulate the volume exponent.
  auto field = [p](double, const Vec<4>& s) {
    const State x{s[0], s[1], s[2]};
    const State f = vector_field_frozen(p, x);
    return Vec<4>{f[0], f[1], f[2], divergence_frozen(p, x)};
  };
  EventSpec<4> ev;
  ev.surface = [](double, const Vec<4>& s) { return s[0] - s[1]; };
  ev.constraint = [](double, const Vec<4>& s) { return s[0] <= 0.0; };
  ev.direction = EventDirection::Rising;
  ev.stop_after = 1;
  const State x0 = section.lift(q);
  const auto res = integrate_with_events<4>(field, 0.0, opt.max_flight,
                                            Vec<4>{x0[0], x0[1], x0[2], 0.0}, cfg, ev);
  if (!res.ok()) throw_integration_failure(res.status, res.t);
  if (res.events.empty()) throw Error(ErrorKind::NoReturn, "no section return");
  const auto& e = res.events.front().state;
  const State x1{e[0], e[1], e[2]};
  const double gdot0 = section.normal_velocity(vector_field_frozen(p, x0));
  const double gdot1 = section.normal_velocity(vector_field_frozen(p, x1));
  return std::exp(e[3]) * gdot0 / gdot1;
}

}  // namespace ratetip
