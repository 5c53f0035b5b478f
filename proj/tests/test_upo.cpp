#include <doctest.h>

#include <cmath>

#include "ratetip/error.hpp"
#include "ratetip/upo.hpp"

using namespace ratetip;

namespace {

const RosslerParams kDefaults{};

// Closest pair of consecutive section crossings along a long run.
SectionPoint best_recurrence(const RosslerParams& p, double duration) {
  const auto cs = detect_crossings(make_frozen_field(p), 0.0, 200.0 + duration, {1, 1, 0}, {});
  double best = 1e300;
  SectionPoint at;
  for (std::size_t i = 1; i < cs.size(); ++i) {
    if (cs[i - 1].t < 200.0) continue;
    const double d = std::hypot(cs[i].point.u - cs[i - 1].point.u, cs[i].point.v - cs[i - 1].point.v);
    if (d < best) {
      best = d;
      at = cs[i - 1].point;
    }
  }
  return at;
}

}  // namespace

TEST_CASE("period-one orbit at defaults") {
  const SectionPoint seed = seed_guess_from_recurrence(kDefaults, {});
  CHECK(seed == seed_guess_from_recurrence(kDefaults, {}));
  const PeriodicOrbit o = find_fixed_point(kDefaults, seed, {});
  CHECK(o.iterations <= 20);
  CHECK(o.residual < 1e-9);
  CHECK(o.period > 5.0);
  CHECK(o.period < 7.0);
  CHECK(std::abs(o.lambda_u) > 1.0);
  CHECK(std::abs(o.lambda_s) < 1.0);
  CHECK(o.is_saddle());
  CHECK(o.flux_det > 0.0);
  CHECK(o.lambda_s * o.lambda_u == doctest::Approx(o.flux_det).epsilon(1e-12));
  CHECK(std::abs(o.lambda_s * o.lambda_u - det(o.jacobian)) < 1e-6);
  const SectionPoint oracle = best_recurrence(kDefaults, 5000.0);
  CHECK(std::hypot(o.gamma.u - oracle.u, o.gamma.v - oracle.v) < 1e-3);

  // Unit eigenvectors with positive leading component, consistent with DP.
  for (const auto& [v, lam] : {std::pair{o.v_u, o.lambda_u}}) {
    CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v[0] > 0.0);
    const Vec2 jv = o.jacobian * v;
    CHECK(std::abs(jv[0] - lam * v[0]) < 1e-9);
    CHECK(std::abs(jv[1] - lam * v[1]) < 1e-9);
  }
  CHECK(norm(o.v_s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one period of the flow returns to gamma") {
  const PeriodicOrbit o =
      find_fixed_point(kDefaults, seed_guess_from_recurrence(kDefaults, {}), {});
  const Section sec;
  const auto r = integrate<3>(make_frozen_field(kDefaults), 0.0, o.period, sec.lift(o.gamma), {});
  REQUIRE(r.ok());
  CHECK(max_norm(r.state - sec.lift(o.gamma)) < 1e-6);
}

TEST_CASE("restart from gamma converges at once") {
  const PeriodicOrbit o =
      find_fixed_point(kDefaults, seed_guess_from_recurrence(kDefaults, {}), {});
  const PeriodicOrbit again = find_fixed_point(kDefaults, o.gamma, {});
  CHECK(again.iterations <= 1);
  CHECK(std::abs(again.gamma.u - o.gamma.u) < 1e-9);
}

TEST_CASE("guess far outside the attractor never reports a spurious fixed point") {
  try {
    const PeriodicOrbit o = find_fixed_point(kDefaults, {-50.0, 0.0}, {});
    const auto back = return_map(kDefaults, o.gamma, {});
    CHECK(std::hypot(back.point.u - o.gamma.u, back.point.v - o.gamma.v) < 1e-9);
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::NewtonDiverged || e.kind() == ErrorKind::NoReturn ||
           e.kind() == ErrorKind::SingularJacobian));
  }
}

TEST_CASE("stable and post-doubling regimes") {
  const RosslerParams stable{0.08, 0.2, 5.7};
  CHECK(recurrence_gap(stable, {}) < 1e-3);
  const PeriodicOrbit s = find_fixed_point(stable, seed_guess_from_recurrence(stable, {}), {});
  CHECK(std::abs(s.lambda_u) < 1.0);
  CHECK(std::abs(s.lambda_s) < 1.0);

  const auto path = continue_orbit(0.2, 5.7, {0.08, 0.1, 0.12, 0.13}, {});
  REQUIRE(path.size() == 4);
  CHECK(path.back().lambda_u < -1.0);
  CHECK(path.front().lambda_u > -1.0);
}

TEST_CASE("period doubling") {
  const double a_pd = locate_period_doubling(0.2, 5.7, 0.05, 0.15, {});
  CHECK(std::abs(a_pd - 0.1096) < 5e-3);
  CHECK_THROWS_AS(locate_period_doubling(0.2, 5.7, 0.05, 0.08, {}), Error);
}

TEST_CASE("2x2 eigen-decomposition") {
  const Eigen2 e = eigen_decompose(Mat2{{{2.0, 1.0}, {1.0, 2.0}}});
  CHECK(e.lambda_small == doctest::Approx(1.0));
  CHECK(e.lambda_large == doctest::Approx(3.0));
  CHECK(e.v_large[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(e.v_large[1] == doctest::Approx(std::sqrt(0.5)));
  CHECK(e.v_small[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(e.v_small[1] == doctest::Approx(-std::sqrt(0.5)));

  const Eigen2 d = eigen_decompose(Mat2{{{-0.5, 0.0}, {0.0, 4.0}}});
  CHECK(d.lambda_small == -0.5);
  CHECK(d.lambda_large == 4.0);
  CHECK(d.v_large[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(eigen_decompose(Mat2{{{0.0, -1.0}, {1.0, 0.0}}}), Error);
}
