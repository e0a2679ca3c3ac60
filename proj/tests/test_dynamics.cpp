#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "scooter/dynamics.hpp"

using namespace scooter;
using doctest::Approx;

namespace {

const ScooterParams kTable = ScooterParams::segway_es4();
constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("table parameters give the expected lumped constants") {
  CHECK(kTable.roll_mass_moment() == Approx(0.54 + 14.0 * 0.34 * 0.34).epsilon(1e-15));
  CHECK(kTable.gravity_torque() == Approx(46.6956).epsilon(1e-12));
  CHECK_NOTHROW(kTable.validate());

  ScooterParams bad = kTable;
  bad.mass = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = kTable;
  bad.wheelbase = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("yaw map examples") {
  PlannerSample s;
  s.speed = 2.1;
  s.steer = kPi / 4;
  YawRates y = yaw_rates(kTable, s);
  CHECK(y.rate == Approx(2.5).epsilon(1e-12));
  CHECK(y.accel == Approx(0.0).epsilon(1e-12));

  s.speed_rate = 1.26;
  y = yaw_rates(kTable, s);
  CHECK(y.accel == Approx(1.5).epsilon(1e-12));

  // Steering-rate term: v/w_b * delta_dot * sec^2(delta).
  s = PlannerSample{};
  s.speed = 0.84;
  s.steer_rate = 0.5;
  y = yaw_rates(kTable, s);
  CHECK(y.rate == 0.0);
  CHECK(y.accel == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("yaw map rejects steering at or beyond pi/2 and non-finite inputs") {
  PlannerSample s;
  s.speed = 1.0;
  s.steer = kPi / 2;
  CHECK_THROWS_AS(yaw_rates(kTable, s), std::domain_error);
  s.steer = -2.0;
  CHECK_THROWS_AS(yaw_rates(kTable, s), std::domain_error);
  s.steer = 0.1;
  s.speed = std::nan("");
  CHECK_THROWS_AS(yaw_rates(kTable, s), std::domain_error);
}

TEST_CASE("yaw acceleration is the time derivative of the yaw rate") {
  // Smooth inputs v(t), delta(t) with known derivatives; compare the analytic
  // psi_ddot against a central difference of psi_dot.
  auto sample = [](double t) {
    PlannerSample s;
    s.t = t;
    s.speed = 2.0 + std::sin(0.7 * t);
    s.speed_rate = 0.7 * std::cos(0.7 * t);
    s.steer = 0.4 * std::sin(1.3 * t);
    s.steer_rate = 0.52 * std::cos(1.3 * t);
    return s;
  };
  const double h = 1e-5;
  for (double t = 0.0; t < 10.0; t += 0.37) {
    const double numeric =
        (yaw_rates(kTable, sample(t + h)).rate - yaw_rates(kTable, sample(t - h)).rate) / (2 * h);
    CHECK(yaw_rates(kTable, sample(t)).accel == Approx(numeric).epsilon(1e-7));
  }
}

TEST_CASE("coupling and gravity coefficient examples") {
  TorqueDecomposition td = torque_decomposition(kTable, YawRates{0.0, 1.0}, 0.0, 0.0);
  CHECK(td.coupling == Approx(2.9988).epsilon(1e-12));
  CHECK(td.gravity == Approx(46.6956).epsilon(1e-12));

  // Upright, no turning: only gravity.
  td = torque_decomposition(kTable, YawRates{}, 3.0, 0.2);
  CHECK(td.coupling == 0.0);
  CHECK(td.amplitude == Approx(46.6956).epsilon(1e-12));
  CHECK(td.phase == 0.0);

  // The two sign variants differ by 2 m h^2 psi_dot^2 sin(theta).
  const YawRates y{1.5, 0.3};
  const double v = 2.0;
  const double th = 0.3;
  const double paper = torque_decomposition(kTable, y, v, th, CouplingSign::paper).coupling;
  const double oracle = torque_decomposition(kTable, y, v, th, CouplingSign::oracle).coupling;
  CHECK(oracle - paper ==
        Approx(2.0 * 14.0 * 0.34 * 0.34 * 1.5 * 1.5 * std::sin(th)).epsilon(1e-12));
}

TEST_CASE("decomposition 3-4-5 and identity") {
  const TorqueDecomposition td = decompose(3.0, 4.0);
  CHECK(td.amplitude == Approx(5.0).epsilon(1e-15));
  CHECK(td.phase == Approx(std::atan(0.75)).epsilon(1e-15));
  CHECK_THROWS(decompose(1.0, 0.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c_dist(-100.0, 100.0);
  std::uniform_real_distribution<double> g_dist(1e-3, 100.0);
  std::uniform_real_distribution<double> th_dist(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const double c = c_dist(rng);
    const double g = g_dist(rng);
    const double th = th_dist(rng);
    const TorqueDecomposition d = decompose(c, g);
    const double lhs = c * std::cos(th) + g * std::sin(th);
    CHECK(std::abs(d.torque(th) - lhs) <= 1e-12 * std::max(1.0, d.amplitude));
  }
}

TEST_CASE("residual decomposition handles non-positive gravity coefficient") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    const double c = dist(rng);
    const double g = dist(rng);
    const double th = dist(rng) / 20.0;
    const TorqueDecomposition d = decompose_residual(c, g);
    CHECK(d.amplitude == Approx(std::hypot(c, g)).epsilon(1e-14));
    CHECK(std::abs(d.torque(th) - (c * std::cos(th) + g * std::sin(th))) <= 1e-11);
  }
  const TorqueDecomposition zero = decompose_residual(0.0, 0.0);
  CHECK(zero.amplitude == 0.0);
  CHECK(zero.torque(0.3) == 0.0);
}

TEST_CASE("roll acceleration examples") {
  const double m = kTable.roll_mass_moment();
  const TorqueDecomposition none = torque_decomposition(kTable, YawRates{}, 0.0, 0.0);
  const RollState tilted{10.0 * kPi / 180.0, 0.0};
  CHECK(roll_accel(kTable, tilted, none, 0.0) == Approx(3.7568).epsilon(1e-4));
  CHECK(roll_accel(kTable, tilted, none, 0.0) ==
        Approx(46.6956 * std::sin(10.0 * kPi / 180.0) / m).epsilon(1e-13));
  // Upright equilibrium is exact.
  CHECK(roll_accel(kTable, RollState{}, none, 0.0) == 0.0);
  CHECK(roll_accel(kTable, RollState{}, none, m) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("upright equilibrium is unstable without control") {
  const TorqueDecomposition none = torque_decomposition(kTable, YawRates{}, 0.0, 0.0);
  for (double eps : {1e-6, 1e-3, 0.1, 1.0}) {
    CHECK(roll_accel(kTable, RollState{eps, 0.0}, none, 0.0) > 0.0);
    CHECK(roll_accel(kTable, RollState{-eps, 0.0}, none, 0.0) < 0.0);
  }
}

TEST_CASE("centre-of-mass velocity and Lagrangian examples") {
  Velocity3 v = com_velocity(kTable, RollState{}, 0.0, 0.0, 1.0);
  CHECK(v.x == Approx(1.0));
  CHECK(v.y == Approx(0.0));
  CHECK(v.z == Approx(0.0));

  // Pure roll rate upright at zero heading: lateral velocity -h theta_dot.
  v = com_velocity(kTable, RollState{0.0, 2.0}, 0.0, 0.0, 0.0);
  CHECK(v.x == Approx(0.0));
  CHECK(v.y == Approx(-0.68));

  CHECK(lagrangian(kTable, RollState{}, 0.0, 0.0, 0.0) == Approx(-46.6956).epsilon(1e-12));
  CHECK(lagrangian(kTable, RollState{}, 0.3, 0.0, 1.0) == Approx(-39.6956).epsilon(1e-12));
}

TEST_CASE("speed of the centre of mass does not depend on heading") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const RollState st{dist(rng), 3.0 * dist(rng)};
    const double psi_dot = 2.0 * dist(rng);
    const double speed = 3.0 + 3.0 * dist(rng);
    const double a = com_velocity(kTable, st, 0.0, psi_dot, speed).squared_norm();
    const double b = com_velocity(kTable, st, 4.0 * dist(rng), psi_dot, speed).squared_norm();
    CHECK(a == Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("Euler-Lagrange residual of a pure pendulum") {
  // With no turning the roll equation is M theta_ddot - G sin(theta) = tau.
  PlannerSample in;
  in.speed = 2.0;
  for (double th : {-0.8, -0.1, 0.0, 0.4, 1.0}) {
    for (double rate : {-2.0, 0.0, 1.5}) {
      const double acc = 0.7;
      const double r = euler_lagrange_residual(kTable, RollState{th, rate}, acc, in, 0.2);
      const double expected = kTable.roll_mass_moment() * acc - kTable.gravity_torque() * std::sin(th);
      CHECK(r == Approx(expected).epsilon(1e-7).scale(50.0));
    }
  }
  CHECK(std::abs(euler_lagrange_residual(kTable, RollState{}, 0.0, PlannerSample{}, 0.0)) < 1e-8);
}

TEST_CASE("Euler-Lagrange residual matches the closed form with the oracle sign") {
  ScooterParams p = kTable;
  p.yaw_inertia = 0.5;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const RollState st{1.2 * u(rng), 5.0 * u(rng)};
    PlannerSample in;
    in.speed = 3.0 + 3.0 * u(rng);
    in.speed_rate = 2.0 * u(rng);
    in.steer = 1.2 * u(rng);
    in.steer_rate = 2.0 * u(rng);
    const double acc = 20.0 * u(rng);
    const double heading = kPi * u(rng);

    const YawRates y = yaw_rates(p, in);
    const TorqueDecomposition td = torque_decomposition(p, y, in.speed, st.angle, CouplingSign::oracle);
    const double m = p.roll_mass_moment();
    const double tau = m * acc - td.coupling * std::cos(st.angle) - td.gravity * std::sin(st.angle);
    const double scale = std::abs(m * acc) + std::abs(td.coupling * std::cos(st.angle)) +
                         std::abs(td.gravity * std::sin(st.angle));
    const double r = euler_lagrange_residual(p, st, acc, in, heading);
    CHECK(std::abs(r - tau) <= 1e-5 * scale);
  }
}

TEST_CASE("capsize predicate") {
  CHECK_FALSE(is_capsized(RollState{1.5707, 0.0}));
  CHECK(is_capsized(RollState{kPi / 2, 0.0}));
  CHECK(is_capsized(RollState{-2.0, 0.0}));
}

TEST_CASE("coupling sign names round-trip") {
  for (CouplingSign s : {CouplingSign::paper, CouplingSign::oracle}) {
    CHECK(coupling_sign_from_string(to_string(s)) == s);
  }
  CHECK_THROWS(coupling_sign_from_string("minus"));
}

}  // TEST_SUITE
