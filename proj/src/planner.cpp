#include "scooter/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scooter {

namespace {

constexpr double kPi = std::numbers::pi;

// Value with first and second derivative along one parameter.
struct Jet2 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

Jet2 operator*(Jet2 a, Jet2 b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
Jet2 operator*(double k, Jet2 a) { return {k * a.v, k * a.d1, k * a.d2}; }
Jet2 operator+(double k, Jet2 a) { return {k + a.v, a.d1, a.d2}; }
Jet2 reciprocal(Jet2 a) {
  const double inv = 1.0 / a.v;
  return {inv, -a.d1 * inv * inv, (2.0 * a.d1 * a.d1 * inv - a.d2) * inv * inv};
}
Jet2 operator/(Jet2 a, Jet2 b) { return a * reciprocal(b); }
Jet2 jet_sin(Jet2 a) {
  const double s = std::sin(a.v);
  const double c = std::cos(a.v);
  return {s, c * a.d1, c * a.d2 - s * a.d1 * a.d1};
}
Jet2 jet_cos(Jet2 a) {
  const double s = std::sin(a.v);
  const double c = std::cos(a.v);
  return {c, -s * a.d1, -s * a.d2 - c * a.d1 * a.d1};
}

struct LemniscateJet {
  Jet2 x;
  Jet2 y;
};

LemniscateJet lemniscate_jet(double a, double u) {
  const Jet2 param{u, 1.0, 0.0};
  const Jet2 s = jet_sin(param);
  const Jet2 c = jet_cos(param);
  const Jet2 denom = 1.0 + s * s;
  return {a * (c / denom), a * ((s * c) / denom)};
}

double lemniscate_speed(double a, double u) {
  const LemniscateJet j = lemniscate_jet(a, u);
  return std::hypot(j.x.d1, j.y.d1);
}

double curvature_from_derivatives(double xp, double yp, double xpp, double ypp) {
  const double tangent2 = xp * xp + yp * yp;
  if (!(tangent2 > 1e-12)) {
    throw std::domain_error("degenerate tangent: curvature undefined");
  }
  return (xp * ypp - yp * xpp) / std::pow(tangent2, 1.5);
}

double lemniscate_curvature(double a, double u) {
  const LemniscateJet j = lemniscate_jet(a, u);
  return curvature_from_derivatives(j.x.d1, j.y.d1, j.x.d2, j.y.d2);
}

// 5-point Gauss-Legendre on [lo, hi].
template <typename F>
double gauss_legendre(F&& f, double lo, double hi) {
  static constexpr std::array<double, 5> nodes{0.0, -0.5384693101056831, 0.5384693101056831,
                                               -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> weights{0.5688888888888889, 0.4786286704993665,
                                                 0.4786286704993665, 0.2369268850561891,
                                                 0.2369268850561891};
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
  return half * sum;
}

// Cumulative arc length over one period of the lemniscate parameter, with
// Newton inversion s -> u inside a segment.
class LemniscateArc {
 public:
  explicit LemniscateArc(double a, std::size_t segments = 2048) : a_(a), du_(2.0 * kPi / segments) {
    cumulative_.resize(segments + 1, 0.0);
    for (std::size_t i = 0; i < segments; ++i) {
      cumulative_[i + 1] = cumulative_[i] + segment_length(i * du_, (i + 1) * du_);
    }
  }

  double length() const { return cumulative_.back(); }

  double parameter_at(double s) const {
    const double total = length();
    const double laps = std::floor(s / total);
    const double rem = s - laps * total;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), rem);
    std::size_t seg = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
    seg = std::clamp<std::size_t>(seg, 1, cumulative_.size() - 1) - 1;
    const double u0 = seg * du_;
    const double target = rem - cumulative_[seg];
    double u = u0 + target / lemniscate_speed(a_, u0);
    for (int iter = 0; iter < 8; ++iter) {
      const double err = segment_length(u0, u) - target;
      u -= err / lemniscate_speed(a_, u);
      if (std::abs(err) < 1e-14 * std::max(1.0, total)) break;
    }
    return u + laps * 2.0 * kPi;
  }

 private:
  double segment_length(double lo, double hi) const {
    return gauss_legendre([this](double u) { return lemniscate_speed(a_, u); }, lo, hi);
  }

  double a_;
  double du_;
  std::vector<double> cumulative_;
};

// Signed curvature at each waypoint from non-uniform three-point
// differences of x(s), y(s). Endpoints copy their neighbour.
std::vector<double> waypoint_curvatures(const std::vector<Waypoint>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> kappa(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = pts[i].s - pts[i - 1].s;
    const double h1 = pts[i + 1].s - pts[i].s;
    auto first = [&](double fm, double f0, double fp) {
      return (-h1 / (h0 * (h0 + h1))) * fm + ((h1 - h0) / (h0 * h1)) * f0 +
             (h0 / (h1 * (h0 + h1))) * fp;
    };
    auto second = [&](double fm, double f0, double fp) {
      return 2.0 * (fm / (h0 * (h0 + h1)) - f0 / (h0 * h1) + fp / (h1 * (h0 + h1)));
    };
    const double xp = first(pts[i - 1].x, pts[i].x, pts[i + 1].x);
    const double yp = first(pts[i - 1].y, pts[i].y, pts[i + 1].y);
    const double xpp = second(pts[i - 1].x, pts[i].x, pts[i + 1].x);
    const double ypp = second(pts[i - 1].y, pts[i].y, pts[i + 1].y);
    kappa[i] = curvature_from_derivatives(xp, yp, xpp, ypp);
  }
  kappa.front() = kappa[1];
  kappa.back() = kappa[n - 2];
  return kappa;
}

double interpolate_waypoint_curvature(const std::vector<Waypoint>& pts,
                                      const std::vector<double>& kappa, double s) {
  if (s < pts.front().s - 1e-9 || s > pts.back().s + 1e-9) {
    throw std::invalid_argument("arc length " + std::to_string(s) +
                                " outside the waypoint table");
  }
  auto it = std::upper_bound(pts.begin(), pts.end(), s,
                             [](double value, const Waypoint& w) { return value < w.s; });
  std::size_t hi = static_cast<std::size_t>(std::distance(pts.begin(), it));
  hi = std::clamp<std::size_t>(hi, 1, pts.size() - 1);
  const std::size_t lo = hi - 1;
  const double f = std::clamp((s - pts[lo].s) / (pts[hi].s - pts[lo].s), 0.0, 1.0);
  return kappa[lo] + f * (kappa[hi] - kappa[lo]);
}

template <typename Row, typename Key, typename Value>
double interpolate_rows(const std::vector<Row>& rows, double t, Key key, Value value) {
  if (t <= key(rows.front())) return value(rows.front());
  if (t >= key(rows.back())) return value(rows.back());
  auto it = std::upper_bound(rows.begin(), rows.end(), t,
                             [&](double x, const Row& r) { return x < key(r); });
  const Row& b = *it;
  const Row& a = *(it - 1);
  const double f = (t - key(a)) / (key(b) - key(a));
  return value(a) + f * (value(b) - value(a));
}

// Central differences with second-order one-sided endpoints.
std::vector<double> differentiate(const std::vector<double>& f, double dt) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / dt;
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dt);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
  return d;
}

}  // namespace

PathSpec PathSpec::lemniscate(double a) {
  PathSpec p;
  p.kind = PathKind::lemniscate;
  p.scale = a;
  return p;
}

PathSpec PathSpec::constant_steer(double steer) {
  PathSpec p;
  p.kind = PathKind::constant_steer;
  p.steer = steer;
  return p;
}

PathSpec PathSpec::waypoint_table(std::vector<Waypoint> points) {
  PathSpec p;
  p.kind = PathKind::waypoint_table;
  p.waypoints = std::move(points);
  return p;
}

PathSpec PathSpec::signal_table(std::vector<SignalRow> rows) {
  PathSpec p;
  p.kind = PathKind::signal_table;
  p.signals = std::move(rows);
  return p;
}

void PathSpec::validate() const {
  switch (kind) {
    case PathKind::lemniscate:
      if (!std::isfinite(scale) || scale <= 0.0) {
        throw std::invalid_argument("lemniscate scale must be positive");
      }
      break;
    case PathKind::constant_steer:
      if (!std::isfinite(steer) || std::abs(steer) >= kPi / 2) {
        throw std::invalid_argument("constant steering angle must satisfy |delta| < pi/2");
      }
      break;
    case PathKind::waypoint_table:
      if (waypoints.size() < 3) throw std::invalid_argument("waypoint table needs >= 3 rows");
      for (std::size_t i = 1; i < waypoints.size(); ++i) {
        if (!(waypoints[i].s > waypoints[i - 1].s)) {
          throw std::invalid_argument("waypoint arc length must be strictly increasing");
        }
      }
      break;
    case PathKind::signal_table:
      if (signals.size() < 2) throw std::invalid_argument("signal table needs >= 2 rows");
      for (std::size_t i = 1; i < signals.size(); ++i) {
        if (!(signals[i].t > signals[i - 1].t)) {
          throw std::invalid_argument("signal table time must be strictly increasing");
        }
      }
      for (const auto& r : signals) {
        if (std::abs(r.steer) >= kPi / 2) {
          throw std::invalid_argument("signal table steering must satisfy |delta| < pi/2");
        }
      }
      break;
  }
}

SpeedProfile SpeedProfile::paper_sinusoid() { return SpeedProfile{}; }

SpeedProfile SpeedProfile::constant(double v0) {
  SpeedProfile p;
  p.kind = SpeedKind::constant;
  p.speed = v0;
  return p;
}

SpeedProfile SpeedProfile::from_table(std::vector<SpeedRow> rows) {
  SpeedProfile p;
  p.kind = SpeedKind::table;
  p.table = std::move(rows);
  return p;
}

double SpeedProfile::speed_at(double t) const {
  switch (kind) {
    case SpeedKind::sinusoid:
      return offset + amplitude * std::sin(frequency * t + phase);
    case SpeedKind::constant:
      return speed;
    case SpeedKind::table:
      if (table.empty()) throw std::invalid_argument("empty speed table");
      return interpolate_rows(
          table, t, [](const SpeedRow& r) { return r.t; },
          [](const SpeedRow& r) { return r.speed; });
  }
  return 0.0;
}

double SignalTrace::horizon() const { return samples.empty() ? 0.0 : samples.back().t; }

PlannerSample SignalTrace::at(double t) const {
  if (samples.empty()) throw std::logic_error("empty signal trace");
  if (t <= samples.front().t) return samples.front();
  if (t >= samples.back().t) return samples.back();
  const double pos = t / dt;
  std::size_t i = static_cast<std::size_t>(pos);
  i = std::min(i, samples.size() - 2);
  const double f = pos - static_cast<double>(i);
  if (f == 0.0) return samples[i];
  const PlannerSample& a = samples[i];
  const PlannerSample& b = samples[i + 1];
  PlannerSample out;
  out.t = t;
  out.speed = a.speed + f * (b.speed - a.speed);
  out.speed_rate = a.speed_rate + f * (b.speed_rate - a.speed_rate);
  out.steer = a.steer + f * (b.steer - a.steer);
  out.steer_rate = a.steer_rate + f * (b.steer_rate - a.steer_rate);
  return out;
}

Point2 lemniscate_point(double a, double u) {
  const double s = std::sin(u);
  const double c = std::cos(u);
  const double denom = 1.0 + s * s;
  return {a * c / denom, a * s * c / denom};
}

double lemniscate_length(double a) { return LemniscateArc(a).length(); }

double path_curvature(const PathSpec& spec, double u) {
  switch (spec.kind) {
    case PathKind::lemniscate:
      return lemniscate_curvature(spec.scale, u);
    case PathKind::waypoint_table: {
      spec.validate();
      return interpolate_waypoint_curvature(spec.waypoints, waypoint_curvatures(spec.waypoints), u);
    }
    case PathKind::constant_steer:
    case PathKind::signal_table:
      break;
  }
  throw std::invalid_argument("path kind has no geometric curvature");
}

double steering_from_curvature(double wheelbase, double curvature) {
  return std::atan(wheelbase * curvature);
}

SignalTrace build_signal_trace(const PathSpec& spec, const SpeedProfile& profile,
                               double wheelbase, double horizon, double dt_signal,
                               const TraceOptions& options) {
  spec.validate();
  if (!(dt_signal > 0.0) || !std::isfinite(dt_signal)) {
    throw std::invalid_argument("signal step must be positive");
  }
  if (!(horizon >= dt_signal) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be at least one signal step");
  }
  const std::size_t n = static_cast<std::size_t>(std::llround(horizon / dt_signal)) + 1;

  std::vector<double> t(n), v(n), v_dot(n), s(n), delta(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = static_cast<double>(k) * dt_signal;

  const bool from_signals = spec.kind == PathKind::signal_table;
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = from_signals ? interpolate_rows(
                              spec.signals, t[k], [](const SignalRow& r) { return r.t; },
                              [](const SignalRow& r) { return r.speed; })
                        : profile.speed_at(t[k]);
    if (!std::isfinite(v[k]) || v[k] < -1e-12) {
      throw std::invalid_argument("speed profile must be non-negative, got " +
                                  std::to_string(v[k]) + " at t=" + std::to_string(t[k]));
    }
  }

  const bool analytic = !from_signals && profile.kind != SpeedKind::table;
  if (analytic && profile.kind == SpeedKind::sinusoid) {
    const double w = profile.frequency;
    for (std::size_t k = 0; k < n; ++k) {
      v_dot[k] = profile.amplitude * w * std::cos(w * t[k] + profile.phase);
      s[k] = profile.offset * t[k] -
             (w == 0.0 ? -profile.amplitude * std::sin(profile.phase) * t[k]
                       : profile.amplitude / w *
                             (std::cos(w * t[k] + profile.phase) - std::cos(profile.phase)));
    }
  } else if (analytic) {
    for (std::size_t k = 0; k < n; ++k) {
      v_dot[k] = 0.0;
      s[k] = profile.speed * t[k];
    }
  } else {
    v_dot = differentiate(v, dt_signal);
    s[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) s[k] = s[k - 1] + 0.5 * dt_signal * (v[k] + v[k - 1]);
  }

  switch (spec.kind) {
    case PathKind::lemniscate: {
      const LemniscateArc arc(spec.scale);
      for (std::size_t k = 0; k < n; ++k) {
        delta[k] = steering_from_curvature(
            wheelbase, lemniscate_curvature(spec.scale, arc.parameter_at(s[k])));
      }
      break;
    }
    case PathKind::waypoint_table: {
      const std::vector<double> kappa = waypoint_curvatures(spec.waypoints);
      for (std::size_t k = 0; k < n; ++k) {
        delta[k] = steering_from_curvature(
            wheelbase,
            interpolate_waypoint_curvature(spec.waypoints, kappa, spec.waypoints.front().s + s[k]));
      }
      break;
    }
    case PathKind::constant_steer:
      std::fill(delta.begin(), delta.end(), spec.steer);
      break;
    case PathKind::signal_table:
      for (std::size_t k = 0; k < n; ++k) {
        delta[k] = interpolate_rows(
            spec.signals, t[k], [](const SignalRow& r) { return r.t; },
            [](const SignalRow& r) { return r.steer; });
      }
      break;
  }

  if (options.steer_rate_limit) {
    const double step = *options.steer_rate_limit * dt_signal;
    if (!(step > 0.0)) throw std::invalid_argument("steering rate limit must be positive");
    for (std::size_t k = 1; k < n; ++k) {
      delta[k] = delta[k - 1] + std::clamp(delta[k] - delta[k - 1], -step, step);
    }
  }

  std::vector<double> delta_dot;
  if (spec.kind == PathKind::constant_steer) {
    delta_dot.assign(n, 0.0);
  } else {
    delta_dot = differentiate(delta, dt_signal);
  }

  SignalTrace trace;
  trace.dt = dt_signal;
  trace.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    trace.samples[k] = PlannerSample{t[k], v[k], v_dot[k], delta[k], delta_dot[k]};
  }
  return trace;
}

}  // namespace scooter
