#include "ratetip/upo.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ratetip/error.hpp"

namespace ratetip {

bool PeriodicOrbit::is_saddle() const {
  return std::fabs(lambda_s) < 1.0 && std::fabs(lambda_u) > 1.0;
}

namespace {

std::vector<CrossingRecord> recurrence_crossings(const RosslerParams& p,
                                                 const IntegratorConfig& cfg,
                                                 const RecurrenceOptions& opt) {
  const auto field = make_frozen_field(p);
  const auto warm = integrate<3>(field, 0.0, opt.transient, opt.start, cfg);
  if (!warm.ok()) throw_integration_failure(warm.status, warm.t);
  auto crossings =
      detect_crossings(field, opt.transient, opt.transient + opt.duration, warm.state, cfg);
  if (crossings.size() < 10)
    throw Error(ErrorKind::NoReturn,
                "only " + std::to_string(crossings.size()) + " section crossings in recurrence run");
  return crossings;
}

std::size_t closest_return(const std::vector<CrossingRecord>& xs) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double d = norm(xs[i + 1].point.vec() - xs[i].point.vec());
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Vec2 eigenvector(const Mat2& m, double lambda) {
  const Vec2 a{m[0][1], lambda - m[0][0]};
  const Vec2 b{lambda - m[1][1], m[1][0]};
  Vec2 v = norm(a) >= norm(b) ? a : b;
  const double n = norm(v);
  if (n == 0.0) return {1.0, 0.0};  // m = lambda I
  v = (1.0 / n) * v;
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) v = -1.0 * v;
  return v;
}

}  // namespace

SectionPoint seed_guess_from_recurrence(const RosslerParams& p, const IntegratorConfig& cfg,
                                        const RecurrenceOptions& opt) {
  const auto xs = recurrence_crossings(p, cfg, opt);
  return xs[closest_return(xs)].point;
}

double recurrence_gap(const RosslerParams& p, const IntegratorConfig& cfg,
                      const RecurrenceOptions& opt) {
  const auto xs = recurrence_crossings(p, cfg, opt);
  const auto i = closest_return(xs);
  return norm(xs[i + 1].point.vec() - xs[i].point.vec());
}

Eigen2 eigen_decompose(const Mat2& m) {
  const double tr = trace(m);
  const double dt = det(m);
  const double disc = tr * tr - 4.0 * dt;
  if (disc < 0.0) throw Error(ErrorKind::ComplexMultipliers, "complex multiplier pair");
  const double q = -0.5 * (tr + std::copysign(std::sqrt(disc), tr));
  // Roots of x^2 - tr x + dt: -q and -dt/q (cancellation-free).
  double l1 = -q;
  double l2 = q != 0.0 ? -dt / q : 0.0;
  if (std::fabs(l1) < std::fabs(l2)) std::swap(l1, l2);
  return {l2, l1, eigenvector(m, l2), eigenvector(m, l1)};
}

PeriodicOrbit find_fixed_point(const RosslerParams& p, const SectionPoint& guess,
                               const IntegratorConfig& cfg, const NewtonOptions& opt) {
  Vec2 xi = guess.vec();
  auto residual_at = [&](const Vec2& at, ReturnResult& ret) {
    ret = return_map(p, SectionPoint::from(at), cfg, opt.map);
    return ret.point.vec() - at;
  };
  ReturnResult ret;
  Vec2 f = residual_at(xi, ret);
  double fn = norm(f);
  int iter = 0;
  while (!(fn < opt.tol)) {
    if (iter >= opt.max_iter)
      throw Error(ErrorKind::NewtonDiverged,
                  "residual " + std::to_string(fn) + " after " + std::to_string(iter) + " iterations");
    ++iter;
    Mat2 j = return_map_jacobian(p, SectionPoint::from(xi), cfg, opt.map);
    j[0][0] -= 1.0;
    j[1][1] -= 1.0;
    const auto step = solve(j, -1.0 * f, opt.singular_det);
    if (!step) throw Error(ErrorKind::SingularJacobian, "det(DP - I) vanishes");
    double scale = 1.0;
    bool improved = false;
    for (int k = 0; k <= opt.max_halvings; ++k, scale *= 0.5) {
      const Vec2 trial = xi + scale * *step;
      ReturnResult trial_ret;
      Vec2 trial_f;
      try {
        trial_f = residual_at(trial, trial_ret);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) throw;
        continue;
      }
      const double tn = norm(trial_f);
      if (tn < fn) {
        xi = trial;
        f = trial_f;
        fn = tn;
        ret = trial_ret;
        improved = true;
        break;
      }
    }
    if (!improved)
      throw Error(ErrorKind::NewtonDiverged,
                  "no damped step reduces the residual " + std::to_string(fn));
  }

  PeriodicOrbit orbit;
  orbit.params = p;
  orbit.gamma = SectionPoint::from(xi);
  orbit.period = ret.flight_time;
  orbit.residual = fn;
  orbit.iterations = iter;
  orbit.jacobian = return_map_jacobian(p, orbit.gamma, cfg, opt.map);
  const auto eig = eigen_decompose(orbit.jacobian);
  orbit.flux_det = return_map_flux_determinant(p, orbit.gamma, cfg, opt.map);
  orbit.lambda_u = eig.lambda_large;
  // The small multiplier sits far below finite-difference resolution; the
  // flux determinant pins it down.
  orbit.lambda_s = orbit.flux_det / eig.lambda_large;
  orbit.v_u = eig.v_large;
  orbit.v_s = eig.v_small;
  return orbit;
}

std::vector<PeriodicOrbit> continue_orbit(double b, double c, const std::vector<double>& a_values,
                                          const IntegratorConfig& cfg, const NewtonOptions& opt) {
  std::vector<PeriodicOrbit> out;
  out.reserve(a_values.size());
  for (double a : a_values) {
    const RosslerParams p{a, b, c};
    const SectionPoint guess =
        out.empty() ? seed_guess_from_recurrence(p, cfg) : out.back().gamma;
    out.push_back(find_fixed_point(p, guess, cfg, opt));
  }
  return out;
}

double locate_period_doubling(double b, double c, double a_lo, double a_hi,
                              const IntegratorConfig& cfg, const PeriodDoublingOptions& pd,
                              const NewtonOptions& opt) {
  if (!(a_lo < a_hi)) throw Error(ErrorKind::InvalidArgument, "a_range must be increasing");
  auto indicator = [](const PeriodicOrbit& o) { return o.lambda_u + 1.0; };

  PeriodicOrbit prev = continue_orbit(b, c, {a_lo}, cfg, opt).front();
  double a_prev = a_lo;
  const int n_steps = static_cast<int>(std::ceil((a_hi - a_lo) / pd.a_step - 1e-9));
  for (int k = 1; k <= n_steps; ++k) {
    const double a = std::fmin(a_lo + k * pd.a_step, a_hi);
    PeriodicOrbit cur = find_fixed_point({a, b, c}, prev.gamma, cfg, opt);
    if (indicator(prev) > 0.0 && indicator(cur) <= 0.0) {
      // Bisect, always seeding from the lower end's orbit.
      double lo = a_prev, hi = a;
      PeriodicOrbit lo_orbit = prev;
      while (hi - lo > pd.a_tol) {
        const double mid = 0.5 * (lo + hi);
        PeriodicOrbit m = find_fixed_point({mid, b, c}, lo_orbit.gamma, cfg, opt);
        if (indicator(m) > 0.0) {
          lo = mid;
          lo_orbit = m;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev = cur;
    a_prev = a;
  }
  throw Error(ErrorKind::NoBracket, "dominant multiplier never crosses -1 on the a-range");
}

}  // namespace ratetip
