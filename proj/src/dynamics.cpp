#include "scooter/dynamics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scooter {

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::domain_error(std::string(what) + " must be finite");
  }
}

void require_positive(double value, const char* what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

void ScooterParams::validate() const {
  require_positive(mass, "mass");
  require_positive(com_height, "com_height");
  require_positive(com_offset, "com_offset");
  require_positive(wheelbase, "wheelbase");
  require_positive(roll_inertia, "roll_inertia");
  require_positive(gravity, "gravity");
  if (!std::isfinite(yaw_inertia) || yaw_inertia < 0.0) {
    throw std::invalid_argument("yaw_inertia must be non-negative and finite");
  }
}

double TorqueDecomposition::torque(double roll) const {
  return coupling * std::cos(roll) + gravity * std::sin(roll);
}

std::string_view to_string(CouplingSign sign) {
  return sign == CouplingSign::paper ? "paper" : "oracle";
}

CouplingSign coupling_sign_from_string(std::string_view name) {
  if (name == "paper") return CouplingSign::paper;
  if (name == "oracle") return CouplingSign::oracle;
  throw std::invalid_argument("unknown coupling sign '" + std::string(name) + "'");
}

YawRates yaw_rates(const ScooterParams& p, const PlannerSample& s) {
  require_finite(s.speed, "speed");
  require_finite(s.speed_rate, "speed rate");
  require_finite(s.steer, "steering angle");
  require_finite(s.steer_rate, "steering rate");
  if (std::abs(s.steer) >= std::numbers::pi / 2) {
    throw std::domain_error("steering angle must satisfy |delta| < pi/2");
  }
  const double tan_steer = std::tan(s.steer);
  YawRates out;
  out.rate = s.speed / p.wheelbase * tan_steer;
  out.accel = s.speed / p.wheelbase * s.steer_rate * (1.0 + tan_steer * tan_steer) +
              s.speed_rate / p.wheelbase * tan_steer;
  return out;
}

TorqueDecomposition torque_decomposition(const ScooterParams& p, const YawRates& yaw, double speed,
                                         double roll, CouplingSign sign) {
  require_finite(yaw.rate, "yaw rate");
  require_finite(yaw.accel, "yaw acceleration");
  require_finite(speed, "speed");
  require_finite(roll, "roll angle");
  const double mh = p.mass * p.com_height;
  const double lean_term = p.com_height * yaw.rate * std::sin(roll);
  const double lateral = sign == CouplingSign::paper ? speed - lean_term : speed + lean_term;
  const double coupling = mh * p.com_offset * yaw.accel + mh * yaw.rate * lateral;
  return decompose(coupling, p.gravity_torque());
}

TorqueDecomposition decompose(double coupling, double gravity) {
  require_finite(coupling, "coupling coefficient");
  if (!std::isfinite(gravity) || gravity <= 0.0) {
    throw std::domain_error("gravity coefficient must be positive");
  }
  TorqueDecomposition td;
  td.coupling = coupling;
  td.gravity = gravity;
  td.amplitude = std::hypot(coupling, gravity);
  td.phase = std::atan(coupling / gravity);
  return td;
}

TorqueDecomposition decompose_residual(double coupling, double gravity) {
  require_finite(coupling, "coupling residual");
  require_finite(gravity, "gravity residual");
  TorqueDecomposition td;
  td.coupling = coupling;
  td.gravity = gravity;
  td.amplitude = std::hypot(coupling, gravity);
  td.phase = std::atan2(coupling, gravity);
  return td;
}

double roll_accel(const ScooterParams& p, const RollState& st, const TorqueDecomposition& td,
                  double torque) {
  require_finite(st.angle, "roll angle");
  require_finite(torque, "torque");
  return (torque + td.torque(st.angle)) / p.roll_mass_moment();
}

Velocity3 com_velocity(const ScooterParams& p, const RollState& st, double heading, double yaw_rate,
                       double speed) {
  const double h = p.com_height;
  const double r = p.com_offset;
  const double sin_psi = std::sin(heading);
  const double cos_psi = std::cos(heading);
  const double sin_th = std::sin(st.angle);
  const double cos_th = std::cos(st.angle);
  const double px_dot = speed * cos_psi;
  const double py_dot = speed * sin_psi;

  Velocity3 v;
  v.x = px_dot - r * yaw_rate * sin_psi + h * st.rate * cos_th * sin_psi +
        h * yaw_rate * sin_th * cos_psi;
  v.y = py_dot + r * yaw_rate * cos_psi - h * st.rate * cos_th * cos_psi +
        h * yaw_rate * sin_th * sin_psi;
  v.z = -h * st.rate * sin_th;
  return v;
}

double lagrangian(const ScooterParams& p, const RollState& st, double heading, double yaw_rate,
                  double speed) {
  const double vc2 = com_velocity(p, st, heading, yaw_rate, speed).squared_norm();
  const double kinetic = 0.5 * p.mass * vc2 + 0.5 * p.roll_inertia * st.rate * st.rate +
                         0.5 * p.yaw_inertia * yaw_rate * yaw_rate;
  const double potential = p.mass * p.gravity * p.com_height * std::cos(st.angle);
  return kinetic - potential;
}

double euler_lagrange_residual(const ScooterParams& p, const RollState& st, double roll_accel,
                               const PlannerSample& inputs, double heading,
                               const FiniteDifferenceSteps& steps) {
  const YawRates yaw = yaw_rates(p, inputs);

  // Generalized configuration (theta, theta_dot, psi, psi_dot, v) and its
  // time derivative along the motion.
  using Point = std::array<double, 5>;
  const Point q{st.angle, st.rate, heading, yaw.rate, inputs.speed};
  const Point q_dot{st.rate, roll_accel, yaw.rate, yaw.accel, inputs.speed_rate};

  auto eval = [&](const Point& x) {
    return lagrangian(p, RollState{x[0], x[1]}, x[2], x[3], x[4]);
  };

  auto d_dtheta_dot = [&](const Point& x) {
    Point up = x;
    Point dn = x;
    up[1] += steps.rate_partial;
    dn[1] -= steps.rate_partial;
    return (eval(up) - eval(dn)) / (2.0 * steps.rate_partial);
  };

  auto directional = [&](double eps) {
    Point up;
    Point dn;
    for (std::size_t i = 0; i < q.size(); ++i) {
      up[i] = q[i] + eps * q_dot[i];
      dn[i] = q[i] - eps * q_dot[i];
    }
    return (d_dtheta_dot(up) - d_dtheta_dot(dn)) / (2.0 * eps);
  };

  // One Richardson step cancels the O(eps^2) term of the central difference.
  const double coarse = directional(steps.time);
  const double fine = directional(0.5 * steps.time);
  const double time_derivative = (4.0 * fine - coarse) / 3.0;

  Point up = q;
  Point dn = q;
  up[0] += steps.partial;
  dn[0] -= steps.partial;
  const double d_dtheta = (eval(up) - eval(dn)) / (2.0 * steps.partial);

  return time_derivative - d_dtheta;
}

bool is_capsized(const RollState& st) { return std::abs(st.angle) >= std::numbers::pi / 2; }

}  // namespace scooter
