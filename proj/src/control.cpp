#include "scooter/control.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scooter {

namespace {

void require_positive(double value, const char* what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

double discriminant(const Gains& g, double roll_mass_moment) {
  return g.kd * g.kd + 4.0 * g.kp * roll_mass_moment;
}

}  // namespace

void Gains::validate() const {
  require_positive(kp, "kp");
  require_positive(kd, "kd");
}

void UncertaintyConfig::validate() const {
  require_positive(mass, "estimated mass");
  require_positive(com_height, "estimated com_height");
  require_positive(com_offset, "estimated com_offset");
  if (!std::isfinite(speed_scale) || !std::isfinite(steer_scale)) {
    throw std::invalid_argument("measurement scales must be finite");
  }
}

UncertaintyConfig UncertaintyConfig::exact(const ScooterParams& actual) {
  UncertaintyConfig u;
  u.mass = actual.mass;
  u.com_height = actual.com_height;
  u.com_offset = actual.com_offset;
  return u;
}

UncertaintyConfig UncertaintyConfig::table_one() {
  UncertaintyConfig u;
  u.speed_scale = 0.8;
  u.mass = 11.2;
  u.com_height = 0.27;
  u.com_offset = 0.50;
  return u;
}

ScooterParams UncertaintyConfig::estimated_params(const ScooterParams& actual) const {
  ScooterParams p = actual;
  p.mass = mass;
  p.com_height = com_height;
  p.com_offset = com_offset;
  return p;
}

PlannerSample UncertaintyConfig::measure(const PlannerSample& truth) const {
  PlannerSample s = truth;
  s.speed *= speed_scale;
  s.speed_rate *= speed_scale;
  s.steer *= steer_scale;
  s.steer_rate *= steer_scale;
  return s;
}

double pd_torque(const Gains& g, const RollState& st) { return -g.kd * st.rate - g.kp * st.angle; }

double flpd_torque(const Gains& g, const RollState& st, double c_hat, double g_hat) {
  return -g.kd * st.rate - g.kp * st.angle - c_hat * std::cos(st.angle) -
         g_hat * std::sin(st.angle);
}

CouplingEstimates estimate_cg(const UncertaintyConfig& u, const ScooterParams& p_est,
                              const PlannerSample& measured, const RollState& st,
                              CouplingSign sign) {
  const PlannerSample seen = u.measure(measured);
  const YawRates yaw = yaw_rates(p_est, seen);
  const TorqueDecomposition td = torque_decomposition(p_est, yaw, seen.speed, st.angle, sign);
  return {td.coupling, td.gravity};
}

double theta_dot_bound(double amplitude, const Gains& g) { return amplitude / g.kd; }

double theta_bound(double amplitude, const Gains& g, double roll_mass_moment) {
  const double root = std::sqrt(discriminant(g, roll_mass_moment));
  return amplitude * (g.kd + root) / (2.0 * g.kd * g.kp);
}

LambdaRange lambda_admissible_range(const Gains& g, double roll_mass_moment) {
  const double root = std::sqrt(discriminant(g, roll_mass_moment));
  return {0.0, 0.5 * (-g.kd + root)};
}

double k_from_lambda(const Gains& g, double roll_mass_moment, double lambda) {
  const LambdaRange range = lambda_admissible_range(g, roll_mass_moment);
  if (!(lambda >= range.lower && lambda < range.upper)) {
    throw std::domain_error("lambda outside the admissible range [0, " +
                            std::to_string(range.upper) + ")");
  }
  return -roll_mass_moment * lambda * lambda + g.kd * lambda + g.kp;
}

BoundReport bound_report(double amplitude, const Gains& g, double roll_mass_moment) {
  BoundReport r;
  r.amplitude = amplitude;
  r.discriminant = discriminant(g, roll_mass_moment);
  r.theta_dot_max = theta_dot_bound(amplitude, g);
  r.theta_max = theta_bound(amplitude, g, roll_mass_moment);
  r.lambda_max = lambda_admissible_range(g, roll_mass_moment).upper;
  return r;
}

double lyapunov_v1(const Gains& g, double roll_mass_moment, const RollState& st) {
  return 0.5 * roll_mass_moment * st.rate * st.rate + 0.5 * g.kp * st.angle * st.angle;
}

double lyapunov_v2(double roll_mass_moment, double k, double lambda, const RollState& st) {
  const double mixed = st.rate + lambda * st.angle;
  return 0.5 * roll_mass_moment * mixed * mixed + 0.5 * k * st.angle * st.angle;
}

double lyapunov_v1_rate(const Gains& g, double disturbance, const RollState& st) {
  return -g.kd * st.rate * st.rate + disturbance * st.rate;
}

double lyapunov_v2_rate(const Gains& g, double roll_mass_moment, double lambda, double disturbance,
                        const RollState& st) {
  const double rate_group =
      (-g.kd + roll_mass_moment * lambda) * st.rate * st.rate + disturbance * st.rate;
  const double angle_group =
      -g.kp * lambda * st.angle * st.angle + lambda * disturbance * st.angle;
  return rate_group + angle_group;
}

}  // namespace scooter
