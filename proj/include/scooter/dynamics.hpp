#pragma once

#include <string_view>

namespace scooter {

/// Physical constants of the vehicle.
///
/// `com_height` and `com_offset` locate the center of mass relative to the
/// rear-wheel contact point with the frame upright: height above the ground
/// and horizontal distance along the wheelbase line.
struct ScooterParams {
  double mass = 14.0;          // kg
  double com_height = 0.34;    // m
  double com_offset = 0.63;    // m
  double wheelbase = 0.84;     // m
  double roll_inertia = 0.54;  // kg m^2
  double yaw_inertia = 0.0;    // kg m^2, only enters the Lagrangian
  double gravity = 9.81;       // m/s^2

  /// Effective roll inertia about the rear contact line, I_roll + m h^2.
  double roll_mass_moment() const { return roll_inertia + mass * com_height * com_height; }

  /// Gravity torque coefficient m g h.
  double gravity_torque() const { return mass * gravity * com_height; }

  /// Throws std::invalid_argument when a field is non-positive or non-finite.
  void validate() const;

  /// Segway ES4 values used throughout the simulation study.
  static ScooterParams segway_es4() { return {}; }
};

/// One time-stamped planner output: rear-wheel speed, steering angle and
/// their rates.
struct PlannerSample {
  double t = 0.0;
  double speed = 0.0;       // m/s
  double speed_rate = 0.0;  // m/s^2
  double steer = 0.0;       // rad
  double steer_rate = 0.0;  // rad/s
};

struct YawRates {
  double rate = 0.0;   // rad/s
  double accel = 0.0;  // rad/s^2
};

struct RollState {
  double angle = 0.0;  // rad, 0 = upright
  double rate = 0.0;   // rad/s
};

/// C cos(theta) + G sin(theta) rewritten as U sin(theta + theta0).
struct TorqueDecomposition {
  double coupling = 0.0;   // C, N m
  double gravity = 0.0;    // G, N m
  double amplitude = 0.0;  // U, N m
  double phase = 0.0;      // theta0, rad

  /// C cos(theta) + G sin(theta).
  double torque(double roll) const;
};

/// Sign of the h*psi_dot*sin(theta) term inside the coupling coefficient.
///
/// `paper` is C = m h r psi_ddot + m h psi_dot (v - h psi_dot sin theta), the
/// form the controllers and bounds are stated for. `oracle` flips the inner
/// sign to the variant that follows from differentiating the Lagrangian.
enum class CouplingSign { paper, oracle };

std::string_view to_string(CouplingSign sign);
CouplingSign coupling_sign_from_string(std::string_view name);

/// Yaw rate and yaw acceleration implied by speed and steering when the rear
/// contact point is the instantaneous center of rotation.
///
/// Throws std::domain_error when |steer| >= pi/2 or an input is non-finite.
YawRates yaw_rates(const ScooterParams& p, const PlannerSample& s);

/// Builds C, G, U and theta0 for the current inputs and roll angle.
TorqueDecomposition torque_decomposition(const ScooterParams& p, const YawRates& yaw, double speed,
                                         double roll, CouplingSign sign = CouplingSign::paper);

/// Amplitude/phase form of given coefficients. Requires gravity > 0 so the
/// phase is atan(C/G) in (-pi/2, pi/2).
TorqueDecomposition decompose(double coupling, double gravity);

/// Amplitude/phase form for an estimation residual, where the gravity
/// coefficient may have either sign. Uses atan2.
TorqueDecomposition decompose_residual(double coupling, double gravity);

/// Roll acceleration (tau + C cos(theta) + G sin(theta)) / M.
double roll_accel(const ScooterParams& p, const RollState& st, const TorqueDecomposition& td,
                  double torque);

struct Velocity3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double squared_norm() const { return x * x + y * y + z * z; }
};

/// Velocity of the center of mass in the ground frame, with the rear contact
/// point moving at `speed` along `heading`.
Velocity3 com_velocity(const ScooterParams& p, const RollState& st, double heading, double yaw_rate,
                       double speed);

/// L = T - W for the roll subsystem.
double lagrangian(const ScooterParams& p, const RollState& st, double heading, double yaw_rate,
                  double speed);

/// Finite-difference steps used by euler_lagrange_residual.
struct FiniteDifferenceSteps {
  double partial = 1e-6;       // dL/dtheta
  double rate_partial = 1e-5;  // dL/dtheta_dot inside the time derivative
  double time = 1e-3;          // directional step along the state velocity, Richardson-refined
};

/// d/dt(dL/dtheta_dot) - dL/dtheta evaluated purely numerically from
/// lagrangian(). The time derivative is the directional derivative of
/// dL/dtheta_dot along (theta_dot, theta_ddot, psi_dot, psi_ddot, v_dot).
double euler_lagrange_residual(const ScooterParams& p, const RollState& st, double roll_accel,
                               const PlannerSample& inputs, double heading,
                               const FiniteDifferenceSteps& steps = {});

/// |theta| >= pi/2.
bool is_capsized(const RollState& st);

}  // namespace scooter
