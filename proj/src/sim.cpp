#include "scooter/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace scooter {

namespace {

TorqueDecomposition plant_decomposition(const Scenario& sc, const PlannerSample& input,
                                        const RollState& st) {
  const YawRates yaw = yaw_rates(sc.actual, input);
  return torque_decomposition(sc.actual, yaw, input.speed, st.angle, sc.coupling_sign);
}

CouplingEstimates controller_estimates(const Scenario& sc, const PlannerSample& input,
                                       const RollState& st) {
  return estimate_cg(sc.uncertainty, sc.uncertainty.estimated_params(sc.actual), input, st,
                     sc.coupling_sign);
}

TorqueDecomposition residual(const Scenario& sc, const PlannerSample& input,
                             const RollState& st) {
  const TorqueDecomposition truth = plant_decomposition(sc, input, st);
  const CouplingEstimates est = controller_estimates(sc, input, st);
  return decompose_residual(truth.coupling - est.coupling, truth.gravity - est.gravity);
}

struct Derivative {
  double angle = 0.0;
  double rate = 0.0;
};

enum class Loop { nominal, residual };

Derivative derivative(const Scenario& sc, Loop loop, double t, const RollState& st,
                      std::optional<double> held_torque) {
  const PlannerSample input = sc.trace.at(t);
  if (loop == Loop::residual) {
    const double m = sc.actual.roll_mass_moment();
    return {st.rate, (pd_torque(sc.gains, st) + residual(sc, input, st).torque(st.angle)) / m};
  }
  const TorqueDecomposition td = plant_decomposition(sc, input, st);
  const double tau = held_torque ? *held_torque : controller_torque(sc, input, st);
  return {st.rate, roll_accel(sc.actual, st, td, tau)};
}

RollState rk4(const Scenario& sc, Loop loop, const RollState& st, double t,
              std::optional<double> held_torque) {
  const double dt = sc.dt;
  const double half = 0.5 * dt;
  auto shifted = [&](const Derivative& d, double h) {
    return RollState{st.angle + h * d.angle, st.rate + h * d.rate};
  };
  const Derivative k1 = derivative(sc, loop, t, st, held_torque);
  const Derivative k2 = derivative(sc, loop, t + half, shifted(k1, half), held_torque);
  const Derivative k3 = derivative(sc, loop, t + half, shifted(k2, half), held_torque);
  const Derivative k4 = derivative(sc, loop, t + dt, shifted(k3, dt), held_torque);
  RollState out;
  out.angle = st.angle + dt / 6.0 * (k1.angle + 2.0 * k2.angle + 2.0 * k3.angle + k4.angle);
  out.rate = st.rate + dt / 6.0 * (k1.rate + 2.0 * k2.rate + 2.0 * k3.rate + k4.rate);
  return out;
}

struct LyapunovSetup {
  double m = 0.0;
  double lambda = 0.0;
  double k = 0.0;
};

LyapunovSetup lyapunov_setup(const Scenario& sc) {
  LyapunovSetup s;
  s.m = sc.actual.roll_mass_moment();
  s.lambda = lambda_admissible_range(sc.gains, s.m).midpoint();
  s.k = k_from_lambda(sc.gains, s.m, s.lambda);
  return s;
}

TrajectorySample record(const Scenario& sc, const LyapunovSetup& ly, double t, const RollState& st,
                        double tau) {
  const PlannerSample input = sc.trace.at(t);
  const YawRates yaw = yaw_rates(sc.actual, input);
  const TorqueDecomposition td =
      torque_decomposition(sc.actual, yaw, input.speed, st.angle, sc.coupling_sign);
  const TorqueDecomposition eff = effective_disturbance(sc, input, st);

  TrajectorySample s;
  s.t = t;
  s.theta = st.angle;
  s.theta_dot = st.rate;
  s.tau = tau;
  s.speed = input.speed;
  s.steer = input.steer;
  s.yaw_rate = yaw.rate;
  s.yaw_accel = yaw.accel;
  s.coupling = td.coupling;
  s.gravity = td.gravity;
  s.amplitude = td.amplitude;
  s.band_amplitude = eff.amplitude;
  s.disturbance = eff.amplitude * std::sin(st.angle + eff.phase);
  s.theta_bound = theta_bound(eff.amplitude, sc.gains, ly.m);
  s.theta_dot_bound = theta_dot_bound(eff.amplitude, sc.gains);
  s.v1 = lyapunov_v1(sc.gains, ly.m, st);
  s.v2 = lyapunov_v2(ly.m, ly.k, ly.lambda, st);
  s.v1_rate = lyapunov_v1_rate(sc.gains, s.disturbance, st);
  s.v2_rate = lyapunov_v2_rate(sc.gains, ly.m, ly.lambda, s.disturbance, st);
  return s;
}

Trajectory integrate(const Scenario& sc, Loop loop) {
  sc.validate();
  if (loop == Loop::residual) {
    if (sc.controller != ControllerKind::flpd) {
      throw std::invalid_argument("the residual system is defined for the flpd controller only");
    }
    if (sc.control_period > 0.0) {
      throw std::invalid_argument("the residual system assumes continuous control");
    }
  }

  const LyapunovSetup ly = lyapunov_setup(sc);
  const std::size_t steps = static_cast<std::size_t>(std::llround(sc.horizon / sc.dt));
  const std::size_t hold_every =
      sc.control_period > 0.0
          ? static_cast<std::size_t>(std::llround(sc.control_period / sc.dt))
          : 0;

  Trajectory traj;
  traj.samples.reserve(steps + 1);
  RollState st{sc.initial_roll, sc.initial_roll_rate};
  std::optional<double> held;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    const PlannerSample input = sc.trace.at(t);
    if (hold_every > 0 && k % hold_every == 0) held = controller_torque(sc, input, st);
    const double tau = held ? *held : controller_torque(sc, input, st);
    traj.samples.push_back(record(sc, ly, t, st, tau));

    if (sc.stop_on_capsize && is_capsized(st)) {
      traj.summary.capsized = true;
      traj.summary.capsize_time = t;
      break;
    }
    if (k == steps) break;
    st = rk4(sc, loop, st, t, held);
  }

  TrajectorySummary& sum = traj.summary;
  for (const TrajectorySample& s : traj.samples) {
    sum.u_max = std::max(sum.u_max, s.band_amplitude);
    sum.true_u_max = std::max(sum.true_u_max, s.amplitude);
    sum.sup_theta = std::max(sum.sup_theta, std::abs(s.theta));
    sum.sup_theta_dot = std::max(sum.sup_theta_dot, std::abs(s.theta_dot));
    sum.sup_tau = std::max(sum.sup_tau, std::abs(s.tau));
  }
  for (const PlannerSample& p : sc.trace.samples) {
    if (p.t > sc.horizon + 0.5 * sc.trace.dt) break;
    sum.max_speed_rate = std::max(sum.max_speed_rate, std::abs(p.speed_rate));
  }
  sum.theta_bound = theta_bound(sum.u_max, sc.gains, ly.m);
  sum.theta_dot_bound = theta_dot_bound(sum.u_max, sc.gains);
  sum.lambda = ly.lambda;
  sum.lyapunov_k = ly.k;
  sum.end_time = traj.samples.back().t;
  return traj;
}

}  // namespace

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::none:
      return "none";
    case ControllerKind::pd:
      return "pd";
    case ControllerKind::flpd:
      return "flpd";
  }
  return "none";
}

ControllerKind controller_from_string(std::string_view name) {
  if (name == "none") return ControllerKind::none;
  if (name == "pd") return ControllerKind::pd;
  if (name == "flpd") return ControllerKind::flpd;
  throw std::invalid_argument("unknown controller '" + std::string(name) + "'");
}

void Scenario::validate() const {
  actual.validate();
  uncertainty.validate();
  gains.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(horizon >= dt) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be at least dt");
  }
  if (!std::isfinite(initial_roll) || std::abs(initial_roll) >= std::numbers::pi / 2) {
    throw std::invalid_argument("initial roll must satisfy |theta0| < pi/2");
  }
  if (!std::isfinite(initial_roll_rate)) throw std::invalid_argument("initial roll rate");
  if (trace.samples.empty()) throw std::invalid_argument("scenario has no input trace");
  if (trace.horizon() + 1e-9 < horizon) {
    throw std::invalid_argument("input trace is shorter than the horizon");
  }
  if (control_period < 0.0 || !std::isfinite(control_period)) {
    throw std::invalid_argument("control period must be non-negative");
  }
  if (control_period > 0.0) {
    const double ratio = control_period / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0) {
      throw std::invalid_argument("control period must be a whole multiple of dt");
    }
  }
}

CapsizeError::CapsizeError(double t, RollState state)
    : std::runtime_error("capsized at t=" + std::to_string(t)), t_(t), state_(state) {}

TorqueDecomposition effective_disturbance(const Scenario& sc, const PlannerSample& input,
                                          const RollState& st) {
  if (sc.controller == ControllerKind::flpd) return residual(sc, input, st);
  return plant_decomposition(sc, input, st);
}

double controller_torque(const Scenario& sc, const PlannerSample& input, const RollState& st) {
  switch (sc.controller) {
    case ControllerKind::none:
      return 0.0;
    case ControllerKind::pd:
      return pd_torque(sc.gains, st);
    case ControllerKind::flpd: {
      const CouplingEstimates est = controller_estimates(sc, input, st);
      return flpd_torque(sc.gains, st, est.coupling, est.gravity);
    }
  }
  return 0.0;
}

RollState step(const Scenario& sc, const RollState& st, double t) {
  std::optional<double> held;
  if (sc.control_period > 0.0) held = controller_torque(sc, sc.trace.at(t), st);
  const RollState next = rk4(sc, Loop::nominal, st, t, held);
  if (sc.stop_on_capsize && is_capsized(next)) throw CapsizeError(t + sc.dt, next);
  return next;
}

RollState step_residual(const Scenario& sc, const RollState& st, double t) {
  if (sc.controller != ControllerKind::flpd) {
    throw std::invalid_argument("the residual system is defined for the flpd controller only");
  }
  return rk4(sc, Loop::residual, st, t, std::nullopt);
}

Trajectory run(const Scenario& sc) { return integrate(sc, Loop::nominal); }

Trajectory run_residual(const Scenario& sc) { return integrate(sc, Loop::residual); }

BoundVerdict check_bounds(const Trajectory& traj, BoundKind which, BoundTolerance tol) {
  BoundVerdict v;
  v.band = which == BoundKind::theta ? traj.summary.theta_bound : traj.summary.theta_dot_bound;
  const double limit = v.band * (1.0 + tol.relative) + tol.absolute;
  auto value = [which](const TrajectorySample& s) {
    return std::abs(which == BoundKind::theta ? s.theta : s.theta_dot);
  };

  auto first = std::find_if(traj.samples.begin(), traj.samples.end(),
                            [&](const TrajectorySample& s) { return value(s) <= limit; });
  if (first == traj.samples.end()) {
    double sup = 0.0;
    for (const auto& s : traj.samples) sup = std::max(sup, value(s));
    v.max_violation = std::max(sup - v.band, 0.0);
    return v;
  }
  v.entered = true;
  v.t_entry = first->t;
  v.contained = true;
  for (auto it = first; it != traj.samples.end(); ++it) {
    const double x = value(*it);
    v.sup_after_entry = std::max(v.sup_after_entry, x);
    v.max_violation = std::max(v.max_violation, x - v.band);
    if (x > limit) v.contained = false;
  }
  return v;
}

LyapunovCheck lyapunov_sign_check(const Trajectory& traj) {
  LyapunovCheck c;
  for (const TrajectorySample& s : traj.samples) {
    if (std::abs(s.theta_dot) > traj.summary.theta_dot_bound) {
      ++c.v1_outside;
      if (!(s.v1_rate < 0.0)) ++c.v1_violations;
    }
    if (std::abs(s.theta) > traj.summary.theta_bound) {
      ++c.v2_outside;
      if (!(s.v2_rate < 0.0)) ++c.v2_violations;
    }
  }
  return c;
}

double pendulum_energy(const ScooterParams& p, const RollState& st) {
  return 0.5 * p.roll_mass_moment() * st.rate * st.rate + p.gravity_torque() * std::cos(st.angle);
}

}  // namespace scooter
