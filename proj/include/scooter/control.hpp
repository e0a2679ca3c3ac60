#pragma once

#include "scooter/dynamics.hpp"

namespace scooter {

struct Gains {
  double kp = 300.0;  // N m/rad
  double kd = 80.0;   // N m s/rad

  /// Both gains must be strictly positive.
  void validate() const;
};

/// Controller-side view of the vehicle: measured speed and steering are
/// scaled, and mass / COM geometry are replaced by estimates. Roll angle
/// and roll rate are measured exactly.
struct UncertaintyConfig {
  double speed_scale = 1.0;
  double steer_scale = 1.0;
  double mass = 14.0;
  double com_height = 0.34;
  double com_offset = 0.63;

  void validate() const;

  /// Scales of 1 and estimates equal to `actual`.
  static UncertaintyConfig exact(const ScooterParams& actual);

  /// v_u = 0.8 v_a, m_u = 11.2 kg, h_u = 0.27 m, r_u = 0.50 m.
  static UncertaintyConfig table_one();

  /// `actual` with mass and COM geometry replaced by the estimates.
  ScooterParams estimated_params(const ScooterParams& actual) const;

  /// The sample as the controller sees it.
  PlannerSample measure(const PlannerSample& truth) const;
};

struct CouplingEstimates {
  double coupling = 0.0;  // C hat
  double gravity = 0.0;   // G hat
};

/// Analytic ultimate bounds for one amplitude value.
struct BoundReport {
  double theta_dot_max = 0.0;
  double theta_max = 0.0;
  double discriminant = 0.0;  // kd^2 + 4 kp M
  double lambda_max = 0.0;
  double amplitude = 0.0;
};

struct LambdaRange {
  double lower = 0.0;
  double upper = 0.0;

  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double lambda) const { return lambda > lower && lambda < upper; }
};

/// -kd theta_dot - kp theta
double pd_torque(const Gains& g, const RollState& st);

/// PD plus cancellation of the estimated coupling and gravity torques.
double flpd_torque(const Gains& g, const RollState& st, double c_hat, double g_hat);

/// C and G recomputed from measured inputs and estimated parameters.
CouplingEstimates estimate_cg(const UncertaintyConfig& u, const ScooterParams& p_est,
                              const PlannerSample& measured, const RollState& st,
                              CouplingSign sign = CouplingSign::paper);

/// U / kd
double theta_dot_bound(double amplitude, const Gains& g);

/// U (kd + sqrt(kd^2 + 4 kp M)) / (2 kd kp)
double theta_bound(double amplitude, const Gains& g, double roll_mass_moment);

/// Positive lambdas for which K = -M lambda^2 + kd lambda + kp stays positive.
LambdaRange lambda_admissible_range(const Gains& g, double roll_mass_moment);

/// K = -M lambda^2 + kd lambda + kp. Throws std::domain_error when lambda is
/// outside lambda_admissible_range.
double k_from_lambda(const Gains& g, double roll_mass_moment, double lambda);

BoundReport bound_report(double amplitude, const Gains& g, double roll_mass_moment);

/// 1/2 M theta_dot^2 + 1/2 kp theta^2
double lyapunov_v1(const Gains& g, double roll_mass_moment, const RollState& st);

/// 1/2 M (theta_dot + lambda theta)^2 + 1/2 K theta^2
double lyapunov_v2(double roll_mass_moment, double k, double lambda, const RollState& st);

// Time derivatives along the PD closed loop M theta_ddot = -kd theta_dot -
// kp theta + U sin(theta + theta0), with `disturbance` the current
// U sin(theta + theta0).
double lyapunov_v1_rate(const Gains& g, double disturbance, const RollState& st);
double lyapunov_v2_rate(const Gains& g, double roll_mass_moment, double lambda, double disturbance,
                        const RollState& st);

}  // namespace scooter
