#pragma once

#include <optional>
#include <vector>

#include "scooter/dynamics.hpp"

namespace scooter {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Arc-length-tagged point of a waypoint path.
struct Waypoint {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Directly specified input signal (speed and steering over time).
struct SignalRow {
  double t = 0.0;
  double speed = 0.0;
  double steer = 0.0;
};

enum class PathKind { lemniscate, waypoint_table, constant_steer, signal_table };

struct PathSpec {
  PathKind kind = PathKind::lemniscate;
  double scale = 15.0;               // lemniscate a, m
  std::vector<Waypoint> waypoints;   // waypoint_table
  double steer = 0.0;                // constant_steer, rad
  std::vector<SignalRow> signals;    // signal_table; speed profile is ignored

  static PathSpec lemniscate(double a);
  static PathSpec constant_steer(double steer);
  static PathSpec waypoint_table(std::vector<Waypoint> points);
  static PathSpec signal_table(std::vector<SignalRow> rows);

  void validate() const;
};

enum class SpeedKind { sinusoid, constant, table };

struct SpeedRow {
  double t = 0.0;
  double speed = 0.0;
};

/// v(t) = offset + amplitude sin(frequency t + phase) for the sinusoid.
struct SpeedProfile {
  SpeedKind kind = SpeedKind::sinusoid;
  double offset = 2.5;
  double amplitude = 2.5;
  double frequency = 0.5;
  double phase = 1.5 * 3.14159265358979323846;
  double speed = 0.0;  // constant
  std::vector<SpeedRow> table;

  /// v = 2.5 + 2.5 sin(t/2 + 3 pi/2).
  static SpeedProfile paper_sinusoid();
  static SpeedProfile constant(double v0);
  static SpeedProfile from_table(std::vector<SpeedRow> rows);

  double speed_at(double t) const;
};

/// Uniformly sampled planner output.
struct SignalTrace {
  double dt = 1e-3;
  std::vector<PlannerSample> samples;

  double horizon() const;

  /// Linear interpolation between neighbouring samples, clamped at both ends.
  PlannerSample at(double t) const;
};

struct TraceOptions {
  /// Limits |steer_rate| by re-integrating the steering command. Off when empty.
  std::optional<double> steer_rate_limit;
};

/// Point on the lemniscate of Bernoulli (x^2 + y^2)^2 = a^2 (x^2 - y^2).
Point2 lemniscate_point(double a, double u);

/// Signed curvature. For the lemniscate `u` is the curve parameter; for
/// waypoint tables it is arc length. Throws std::domain_error at a
/// degenerate tangent and std::invalid_argument for kinds without geometry.
double path_curvature(const PathSpec& spec, double u);

/// Steering angle whose kinematic turn rate equals curvature * speed.
double steering_from_curvature(double wheelbase, double curvature);

/// Samples (v, v_dot, delta, delta_dot) on [0, horizon] with step dt_signal.
SignalTrace build_signal_trace(const PathSpec& spec, const SpeedProfile& profile,
                               double wheelbase, double horizon, double dt_signal,
                               const TraceOptions& options = {});

/// Arc length of one full lemniscate loop.
double lemniscate_length(double a);

}  // namespace scooter
