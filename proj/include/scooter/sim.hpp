#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scooter/control.hpp"
#include "scooter/dynamics.hpp"
#include "scooter/planner.hpp"

namespace scooter {

enum class ControllerKind { none, pd, flpd };

std::string_view to_string(ControllerKind kind);
ControllerKind controller_from_string(std::string_view name);

/// Closed-loop simulation setup. The plant always uses `actual`; the
/// feedback-linearizing controller sees `uncertainty`.
struct Scenario {
  std::string name = "scenario";
  ScooterParams actual;
  UncertaintyConfig uncertainty;
  Gains gains;
  ControllerKind controller = ControllerKind::pd;
  CouplingSign coupling_sign = CouplingSign::paper;
  SignalTrace trace;
  double initial_roll = 10.0 * 3.14159265358979323846 / 180.0;
  double initial_roll_rate = 0.0;
  double dt = 1e-3;
  double horizon = 20.0;
  /// Zero-order-hold period for the controller torque. Zero means the torque
  /// is re-evaluated at every integrator stage.
  double control_period = 0.0;
  /// When false the integration continues through |theta| >= pi/2.
  bool stop_on_capsize = true;

  void validate() const;
};

/// Thrown by step() when the new state has capsized.
class CapsizeError : public std::runtime_error {
 public:
  CapsizeError(double t, RollState state);
  double time() const { return t_; }
  const RollState& state() const { return state_; }

 private:
  double t_;
  RollState state_;
};

/// Torque decomposition of everything the controller does not cancel: the
/// true C, G for none/pd, and C - C_hat, G - G_hat for flpd.
TorqueDecomposition effective_disturbance(const Scenario& sc, const PlannerSample& input,
                                          const RollState& st);

/// Torque commanded by the scenario's controller for the given input and state.
double controller_torque(const Scenario& sc, const PlannerSample& input, const RollState& st);

/// One classic RK4 step of length sc.dt starting at time t.
RollState step(const Scenario& sc, const RollState& st, double t);

/// One RK4 step of the error system M theta_ddot = -kd theta_dot - kp theta +
/// C~ cos(theta) + G~ sin(theta). Requires an flpd scenario.
RollState step_residual(const Scenario& sc, const RollState& st, double t);

struct TrajectorySample {
  double t = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  double tau = 0.0;
  double speed = 0.0;
  double steer = 0.0;
  double yaw_rate = 0.0;
  double yaw_accel = 0.0;
  double coupling = 0.0;   // true C
  double gravity = 0.0;    // true G
  double amplitude = 0.0;  // true U
  /// Amplitude of the uncancelled disturbance (U for pd/none, U~ for flpd)
  /// and the bounds it implies at this instant.
  double band_amplitude = 0.0;
  double disturbance = 0.0;  // U_eff sin(theta + theta0_eff)
  double theta_bound = 0.0;
  double theta_dot_bound = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double v1_rate = 0.0;
  double v2_rate = 0.0;
};

struct TrajectorySummary {
  double u_max = 0.0;        // sup of band_amplitude over the executed horizon
  double true_u_max = 0.0;   // sup of true U
  double theta_bound = 0.0;  // from u_max
  double theta_dot_bound = 0.0;
  double lambda = 0.0;       // V2 parameter, midpoint of the admissible range
  double lyapunov_k = 0.0;
  double sup_theta = 0.0;
  double sup_theta_dot = 0.0;
  double sup_tau = 0.0;
  double max_speed_rate = 0.0;  // observed sup |v_dot| of the input trace
  bool capsized = false;
  double capsize_time = 0.0;
  double end_time = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectorySummary summary;
};

/// Integrates the closed loop over the horizon and records every step.
/// On capsize (with stop_on_capsize) the trajectory ends at the first
/// capsized sample and summary.capsized is set.
Trajectory run(const Scenario& sc);

/// Same recording for the residual error system (flpd only).
Trajectory run_residual(const Scenario& sc);

enum class BoundKind { theta, theta_dot };

struct BoundTolerance {
  double relative = 1e-9;
  double absolute = 0.0;
};

struct BoundVerdict {
  double band = 0.0;
  bool entered = false;
  double t_entry = 0.0;
  bool contained = false;
  double max_violation = 0.0;      // max(|x| - band, 0) after entry
  double sup_after_entry = 0.0;    // sup |x| after entry
};

/// Finds the first sample inside the band computed from summary.u_max and
/// checks every later sample stays inside it.
BoundVerdict check_bounds(const Trajectory& traj, BoundKind which, BoundTolerance tol = {});

/// Samples outside a bound band whose Lyapunov derivative is not negative.
/// V1 is checked where |theta_dot| > theta_dot_bound, V2 where |theta| >
/// theta_bound, both bands taken from summary.u_max.
struct LyapunovCheck {
  std::size_t v1_outside = 0;
  std::size_t v1_violations = 0;
  std::size_t v2_outside = 0;
  std::size_t v2_violations = 0;
};

LyapunovCheck lyapunov_sign_check(const Trajectory& traj);

/// Pendulum energy 1/2 M theta_dot^2 + G cos(theta).
double pendulum_energy(const ScooterParams& p, const RollState& st);

}  // namespace scooter
