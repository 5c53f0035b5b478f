#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "ratetip/error.hpp"
#include "ratetip/integrate.hpp"
#include "ratetip/poincare.hpp"

using namespace ratetip;

namespace {

auto decay = [](double, const Vec<1>& x) { return Vec<1>{-x[0]}; };
auto oscillator = [](double, const Vec2& x) { return Vec2{x[1], -x[0]}; };

}  // namespace

TEST_CASE("exponential decay") {
  IntegratorConfig cfg;
  cfg.rtol = cfg.atol = 1e-10;
  const auto r = integrate<1>(decay, 0.0, 1.0, Vec<1>{1.0}, cfg);
  REQUIRE(r.ok());
  CHECK(r.t == 1.0);
  CHECK(std::abs(r.state[0] - std::exp(-1.0)) < 10 * cfg.rtol);
}

TEST_CASE("harmonic oscillator closes after one period") {
  const auto r = integrate<2>(oscillator, 0.0, 2 * std::numbers::pi, Vec2{1.0, 0.0}, {});
  REQUIRE(r.ok());
  CHECK(std::abs(r.state[0] - 1.0) < 1e-9);
  CHECK(std::abs(r.state[1]) < 1e-9);
}

TEST_CASE("tighter tolerances never increase the error") {
  double prev = std::numeric_limits<double>::infinity();
  for (double tol = 1e-6; tol >= 1e-12 * 0.99; tol /= 2) {
    IntegratorConfig cfg;
    cfg.rtol = cfg.atol = tol;
    const auto r = integrate<1>(decay, 0.0, 1.0, Vec<1>{1.0}, cfg);
    const double err = std::abs(r.state[0] - std::exp(-1.0));
    CHECK(err <= prev * 1.05 + 1e-16);
    prev = err;
  }
}

TEST_CASE("fixed-step global error is fifth order") {
  double errs[4];
  const double steps[4] = {0.2, 0.1, 0.05, 0.025};
  for (int i = 0; i < 4; ++i) {
    IntegratorConfig cfg;
    cfg.fixed_step = steps[i];
    const auto r = integrate<1>(decay, 0.0, 2.0, Vec<1>{1.0}, cfg);
    REQUIRE(r.ok());
    errs[i] = std::abs(r.state[0] - std::exp(-2.0));
  }
  for (int i = 0; i < 3; ++i) {
    const double order = std::log2(errs[i] / errs[i + 1]);
    CHECK(order > 4.6);
    CHECK(order < 5.4);
  }

  // Same study on the oscillator.
  double e_prev = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    IntegratorConfig cfg;
    cfg.fixed_step = h;
    const auto r = integrate<2>(oscillator, 0.0, 4.0, Vec2{1.0, 0.0}, cfg);
    const double e = std::hypot(r.state[0] - std::cos(4.0), r.state[1] + std::sin(4.0));
    if (e_prev > 0.0) {
      CHECK(std::log2(e_prev / e) > 4.6);
      CHECK(std::log2(e_prev / e) < 5.4);
    }
    e_prev = e;
  }
}

TEST_CASE("linear crossing event") {
  EventSpec<1> ev;
  ev.surface = [](double, const Vec<1>& x) { return x[0]; };
  ev.direction = EventDirection::Rising;
  const auto r = integrate<1>([](double, const Vec<1>&) { return Vec<1>{1.0}; }, 0.0, 3.0,
                              Vec<1>{-1.0}, {}, &ev);
  REQUIRE(r.events.size() == 1);
  CHECK(std::abs(r.events[0].t - 1.0) < 1e-10);
  CHECK(std::abs(r.events[0].state[0]) < 1e-10);
}

TEST_CASE("zeros of cosine, both directions") {
  EventSpec<2> ev;
  ev.surface = [](double, const Vec2& x) { return x[0]; };
  const auto r = integrate<2>(oscillator, 0.0, 4 * std::numbers::pi, Vec2{1.0, 0.0}, {}, &ev);
  REQUIRE(r.events.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(r.events[k].t - (2 * k + 1) * std::numbers::pi / 2) < 1e-10);
    CHECK(std::abs(r.events[k].state[0]) < 1e-10);
  }

  ev.direction = EventDirection::Rising;
  const auto rising = integrate<2>(oscillator, 0.0, 4 * std::numbers::pi, Vec2{1.0, 0.0}, {}, &ev);
  REQUIRE(rising.events.size() == 2);
  CHECK(std::abs(rising.events[0].t - 1.5 * std::numbers::pi) < 1e-10);

  ev.constraint = [](double, const Vec2& x) { return x[1] > 0.0; };
  ev.direction = EventDirection::Both;
  CHECK(integrate<2>(oscillator, 0.0, 4 * std::numbers::pi, Vec2{1.0, 0.0}, {}, &ev).events.size() ==
        2);

  ev.constraint = {};
  ev.stop_after = 3;
  const auto stopped = integrate<2>(oscillator, 0.0, 4 * std::numbers::pi, Vec2{1.0, 0.0}, {}, &ev);
  CHECK(stopped.stopped_by_event);
  CHECK(stopped.t == doctest::Approx(2.5 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("Roessler section returns take 4 to 8 time units") {
  const RosslerParams p;
  const Section sec;
  const auto ev = sec.event_spec();
  const auto r = integrate<3>(make_frozen_field(p), 0.0, 600.0, State{1, 1, 0}, {}, &ev);
  REQUIRE(r.events.size() > 60);
  for (std::size_t i = 10; i < r.events.size(); ++i) {
    const double gap = r.events[i].t - r.events[i - 1].t;
    REQUIRE(gap >= 4.0);
    REQUIRE(gap <= 8.0);
  }
}

TEST_CASE("dense sampling grid") {
  OutputOptions out;
  out.sample_dt = 0.25;
  const auto r = integrate<1>(decay, 0.0, 2.0, Vec<1>{1.0}, {}, nullptr, out);
  REQUIRE(r.samples.size() == 9);
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    CHECK(r.samples[k].t == doctest::Approx(0.25 * k));
    CHECK(std::abs(r.samples[k].state[0] - std::exp(-0.25 * k)) < 1e-10);
  }
}

TEST_CASE("reversed interval is rejected, empty interval is a no-op") {
  CHECK_THROWS_AS(integrate<1>(decay, 1.0, 0.0, Vec<1>{1.0}, {}), Error);
  const auto r = integrate<1>(decay, 1.0, 1.0, Vec<1>{0.5}, {});
  CHECK(r.ok());
  CHECK(r.state[0] == 0.5);
}

TEST_CASE("failure statuses") {
  auto blow = [](double, const Vec<1>& x) { return Vec<1>{x[0] * x[0]}; };
  const auto b = integrate<1>(blow, 0.0, 2.0, Vec<1>{1.0}, {});
  CHECK(b.status == IntegratorStatus::Blowup);
  CHECK(b.t < 1.0);

  IntegratorConfig small;
  small.max_steps = 3;
  CHECK(integrate<1>(decay, 0.0, 100.0, Vec<1>{1.0}, small).status ==
        IntegratorStatus::StepBudgetExceeded);

  auto nan_field = [](double t, const Vec<1>&) {
    return Vec<1>{t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0};
  };
  CHECK(integrate<1>(nan_field, 0.0, 1.0, Vec<1>{0.0}, {}).status ==
        IntegratorStatus::NonFiniteState);

  CHECK(to_string(IntegratorStatus::Success) == "ok");
  CHECK_THROWS_AS(throw_integration_failure(IntegratorStatus::Blowup, 1.0), Error);
}

TEST_CASE("config validation") {
  IntegratorConfig cfg;
  cfg.rtol = -1.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.h_max = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  CHECK_NOTHROW(validate(IntegratorConfig{}));
}
