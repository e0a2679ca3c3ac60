#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "scooter/planner.hpp"

using namespace scooter;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWheelbase = 0.84;

// Curvature from central differences of the point map (independent of the
// planner's analytic derivatives).
double numeric_curvature(double a, double u) {
  const double h = 1e-4;
  const Point2 m = lemniscate_point(a, u - h);
  const Point2 c = lemniscate_point(a, u);
  const Point2 p = lemniscate_point(a, u + h);
  const double xp = (p.x - m.x) / (2 * h);
  const double yp = (p.y - m.y) / (2 * h);
  const double xpp = (p.x - 2 * c.x + m.x) / (h * h);
  const double ypp = (p.y - 2 * c.y + m.y) / (h * h);
  return (xp * ypp - yp * xpp) / std::pow(xp * xp + yp * yp, 1.5);
}

std::vector<Waypoint> circle_table(double radius, int n) {
  std::vector<Waypoint> pts;
  for (int i = 0; i < n; ++i) {
    const double phi = 0.05 * i;
    pts.push_back({radius * phi, radius * std::cos(phi), radius * std::sin(phi)});
  }
  return pts;
}

}  // namespace

TEST_SUITE("planner") {

TEST_CASE("lemniscate point examples") {
  const Point2 p0 = lemniscate_point(15.0, 0.0);
  CHECK(p0.x == Approx(15.0));
  CHECK(p0.y == Approx(0.0));
  const Point2 p1 = lemniscate_point(15.0, kPi / 2);
  CHECK(std::abs(p1.x) < 1e-12);
  CHECK(std::abs(p1.y) < 1e-12);
  const Point2 p2 = lemniscate_point(15.0, kPi);
  CHECK(p2.x == Approx(-15.0));
}

TEST_CASE("lemniscate points satisfy the implicit equation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  const double a = 15.0;
  for (int i = 0; i < 1000; ++i) {
    const Point2 p = lemniscate_point(a, u(rng));
    const double r2 = p.x * p.x + p.y * p.y;
    CHECK(std::abs(r2 * r2 - a * a * (p.x * p.x - p.y * p.y)) < 1e-9 * a * a * a * a);
  }
}

TEST_CASE("lemniscate curvature") {
  const PathSpec lem = PathSpec::lemniscate(15.0);
  CHECK(std::abs(path_curvature(lem, 0.0)) == Approx(0.2).epsilon(1e-12));
  CHECK(path_curvature(lem, 0.0) == Approx(numeric_curvature(15.0, 0.0)).epsilon(1e-6));
  // Inflection at the crossing point.
  CHECK(std::abs(path_curvature(lem, kPi / 2)) < 1e-12);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int i = 0; i < 200; ++i) {
    const double uu = u(rng);
    const double k = path_curvature(lem, uu);
    CHECK(k == Approx(numeric_curvature(15.0, uu)).epsilon(1e-5).scale(1e-3));
    // |kappa| = 3 rho / a^2 for this curve.
    const Point2 p = lemniscate_point(15.0, uu);
    CHECK(std::abs(k) == Approx(3.0 * std::hypot(p.x, p.y) / 225.0).epsilon(1e-10).scale(1e-9));
  }
}

TEST_CASE("lemniscate length") {
  const double a = 15.0;
  // Polyline oracle.
  const int n = 400000;
  double len = 0.0;
  Point2 prev = lemniscate_point(a, 0.0);
  for (int i = 1; i <= n; ++i) {
    const Point2 p = lemniscate_point(a, 2 * kPi * i / n);
    len += std::hypot(p.x - prev.x, p.y - prev.y);
    prev = p;
  }
  CHECK(lemniscate_length(a) == Approx(len).epsilon(1e-8));
  // 2 * lemniscate constant * a.
  CHECK(lemniscate_length(a) == Approx(2.0 * 2.6220575542921198 * a).epsilon(1e-12));
  CHECK(lemniscate_length(a) == Approx(78.6617).epsilon(1e-6));
}

TEST_CASE("waypoint table curvature") {
  std::vector<Waypoint> straight;
  for (int i = 0; i < 20; ++i) straight.push_back({1.0 * i, 0.5 * i, 0.0});
  // s must be arc length for curvature; rescale.
  for (auto& w : straight) w.s = w.x;
  const PathSpec line = PathSpec::waypoint_table(straight);
  CHECK(std::abs(path_curvature(line, 3.3)) < 1e-12);

  const PathSpec circle = PathSpec::waypoint_table(circle_table(10.0, 60));
  for (double s : {0.0, 1.0, 5.5, 20.0, 29.0}) {
    CHECK(path_curvature(circle, s) == Approx(0.1).epsilon(1e-3));
  }
  CHECK_THROWS_AS(path_curvature(circle, 100.0), std::invalid_argument);

  std::vector<Waypoint> stuck{{0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {2.0, 1.0, 1.0}};
  CHECK_THROWS_AS(path_curvature(PathSpec::waypoint_table(stuck), 0.5), std::domain_error);

  std::vector<Waypoint> unordered{{0.0, 0.0, 0.0}, {2.0, 1.0, 0.0}, {1.0, 2.0, 0.0}};
  CHECK_THROWS_AS(PathSpec::waypoint_table(unordered).validate(), std::invalid_argument);
  CHECK_THROWS_AS(path_curvature(PathSpec::constant_steer(0.1), 0.0), std::invalid_argument);
}

TEST_CASE("steering from curvature") {
  CHECK(steering_from_curvature(kWheelbase, 0.2) == Approx(0.16645).epsilon(1e-4));
  CHECK(steering_from_curvature(kWheelbase, 0.2) == Approx(std::atan(0.168)).epsilon(1e-15));
  CHECK(steering_from_curvature(kWheelbase, 0.0) == 0.0);
  CHECK(steering_from_curvature(kWheelbase, -0.2) == -steering_from_curvature(kWheelbase, 0.2));
}

TEST_CASE("curvature to steering to yaw rate round trip") {
  for (double kappa : {-0.3, -0.05, 0.0, 0.1, 0.2}) {
    const double delta = steering_from_curvature(kWheelbase, kappa);
    ScooterParams p;
    const SignalTrace tr = build_signal_trace(PathSpec::constant_steer(delta),
                                              SpeedProfile::constant(3.0), kWheelbase, 2.0, 0.01);
    for (const auto& s : tr.samples) {
      CHECK(yaw_rates(p, s).rate == Approx(kappa * 3.0).epsilon(1e-9).scale(1e-9));
      CHECK(yaw_rates(p, s).accel == 0.0);
    }
  }
}

TEST_CASE("sinusoidal speed profile") {
  const SpeedProfile v = SpeedProfile::paper_sinusoid();
  CHECK(std::abs(v.speed_at(0.0)) < 1e-12);
  CHECK(v.speed_at(kPi) == Approx(2.5).epsilon(1e-12));
  CHECK(v.speed_at(2 * kPi) == Approx(5.0).epsilon(1e-12));

  const SignalTrace tr =
      build_signal_trace(PathSpec::lemniscate(15.0), v, kWheelbase, 20.0, 1e-3);
  double max_rate = 0.0;
  double max_steer = 0.0;
  for (const auto& s : tr.samples) {
    CHECK(s.speed >= -1e-12);
    CHECK(s.speed_rate == Approx(1.25 * std::cos(0.5 * s.t + 1.5 * kPi)).epsilon(1e-12).scale(1e-12));
    max_rate = std::max(max_rate, std::abs(s.speed_rate));
    max_steer = std::max(max_steer, std::abs(s.steer));
  }
  CHECK(max_rate == Approx(1.25).epsilon(1e-6));
  CHECK(max_steer == Approx(std::atan(0.168)).epsilon(1e-6));
  CHECK(tr.horizon() == Approx(20.0));
}

TEST_CASE("steering follows the arc length travelled") {
  // At t = 2 pi the distance travelled is offset*t + A/w*(1 - cos) = 5 pi.
  const SignalTrace tr = build_signal_trace(PathSpec::lemniscate(15.0),
                                            SpeedProfile::paper_sinusoid(), kWheelbase, 8.0, 1e-3);
  const PlannerSample s = tr.at(2 * kPi);
  // Locate u with arc length 5 pi by a polyline walk and compare steering.
  const double target = 5.0 * kPi;
  double len = 0.0;
  double u = 0.0;
  Point2 prev = lemniscate_point(15.0, 0.0);
  const double du = 1e-6;
  while (len < target) {
    u += du;
    const Point2 p = lemniscate_point(15.0, u);
    len += std::hypot(p.x - prev.x, p.y - prev.y);
    prev = p;
  }
  const double expected = std::atan(kWheelbase * numeric_curvature(15.0, u));
  CHECK(s.steer == Approx(expected).epsilon(1e-4));
}

TEST_CASE("steering rate converges at second order") {
  const PathSpec lem = PathSpec::lemniscate(15.0);
  const SpeedProfile v = SpeedProfile::paper_sinusoid();
  const SignalTrace ref = build_signal_trace(lem, v, kWheelbase, 20.0, 1e-4);
  auto err = [&](double dt) {
    const SignalTrace tr = build_signal_trace(lem, v, kWheelbase, 20.0, dt);
    double worst = 0.0;
    for (double t = 1.0; t < 19.0; t += 0.2) {
      const std::size_t k = static_cast<std::size_t>(std::llround(t / dt));
      const std::size_t kr = static_cast<std::size_t>(std::llround(t / 1e-4));
      worst = std::max(worst, std::abs(tr.samples[k].steer_rate - ref.samples[kr].steer_rate));
    }
    return worst;
  };
  const double e1 = err(0.04);
  const double e2 = err(0.02);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.1));
}

TEST_CASE("trace interpolation and clamping") {
  const SignalTrace tr = build_signal_trace(
      PathSpec::signal_table({{0.0, 1.0, 0.0}, {1.0, 3.0, 0.2}, {2.0, 3.0, 0.2}}),
      SpeedProfile::constant(0.0), kWheelbase, 2.0, 0.5);
  REQUIRE(tr.samples.size() == 5);
  CHECK(tr.samples[1].speed == Approx(2.0));
  CHECK(tr.samples[1].steer == Approx(0.1));
  CHECK(tr.samples[1].speed_rate == Approx(2.0));
  CHECK(tr.at(0.25).speed == Approx(1.5));
  CHECK(tr.at(-1.0).speed == tr.samples.front().speed);
  CHECK(tr.at(10.0).speed == tr.samples.back().speed);
}

TEST_CASE("steering rate limit") {
  TraceOptions opt;
  opt.steer_rate_limit = 0.1;
  const SignalTrace tr = build_signal_trace(
      PathSpec::signal_table({{0.0, 1.0, 0.0}, {0.1, 1.0, 0.5}, {2.0, 1.0, 0.5}}),
      SpeedProfile::constant(0.0), kWheelbase, 2.0, 0.01, opt);
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    CHECK(std::abs(tr.samples[k].steer - tr.samples[k - 1].steer) <= 0.1 * 0.01 + 1e-15);
  }
  CHECK(tr.samples.back().steer == Approx(0.2));
}

TEST_CASE("speed tables and invalid inputs") {
  const SpeedProfile table = SpeedProfile::from_table({{0.0, 0.0}, {2.0, 4.0}});
  CHECK(table.speed_at(1.0) == Approx(2.0));
  const SignalTrace tr = build_signal_trace(PathSpec::constant_steer(0.0), table, kWheelbase, 2.0, 0.1);
  CHECK(tr.samples[5].speed_rate == Approx(2.0));

  CHECK_THROWS_AS(build_signal_trace(PathSpec::constant_steer(0.0), SpeedProfile::constant(-1.0),
                                     kWheelbase, 1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_signal_trace(PathSpec::constant_steer(0.0), SpeedProfile::constant(1.0),
                                     kWheelbase, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_signal_trace(PathSpec::constant_steer(2.0), SpeedProfile::constant(1.0),
                                     kWheelbase, 1.0, 0.1),
                  std::invalid_argument);
}

}  // TEST_SUITE
