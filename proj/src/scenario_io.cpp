#include "scooter/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace scooter {

using nlohmann::json;

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

json params_json(const ScooterParams& p) {
  return {{"mass", p.mass},
          {"com_height", p.com_height},
          {"com_offset", p.com_offset},
          {"wheelbase", p.wheelbase},
          {"roll_inertia", p.roll_inertia},
          {"yaw_inertia", p.yaw_inertia},
          {"gravity", p.gravity}};
}

// Keys whose values are angles and may be given with a unit suffix.
bool is_angle_key(std::string_view pointer) {
  return pointer == "/initial/roll" || pointer == "/path/steer" || pointer == "/speed/phase";
}

std::string to_pointer(std::string_view dotted) {
  std::string out;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const std::size_t dot = dotted.find('.', start);
    const std::string_view part =
        dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (part.empty()) throw ConfigError("malformed override key '" + std::string(dotted) + "'");
    out += '/';
    out += part;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

template <typename T>
T get_field(const json& doc, const char* pointer) {
  const json::json_pointer ptr(pointer);
  if (!doc.contains(ptr)) throw ConfigError(std::string("missing scenario key ") + pointer);
  try {
    return doc.at(ptr).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario key ") + pointer + ": " + e.what());
  }
}

double angle_field(const json& doc, const char* pointer) {
  const json::json_pointer ptr(pointer);
  if (!doc.contains(ptr)) throw ConfigError(std::string("missing scenario key ") + pointer);
  try {
    return parse_angle(doc.at(ptr));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("scenario key ") + pointer + ": " + e.what());
  }
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& file,
                                                  std::vector<std::string>& header) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open table " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty table " + file.string());
  header.clear();
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      header.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": bad number '" +
                          cell + "'");
      }
    }
    if (row.size() != header.size()) {
      throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, std::string_view name,
                   const std::filesystem::path& file) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError(file.string() + ": missing column '" + std::string(name) + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

json verdict_json(const BoundVerdict& v) {
  return {{"band", v.band},
          {"entered", v.entered},
          {"t_entry", v.t_entry},
          {"contained", v.contained},
          {"max_violation", v.max_violation},
          {"sup_after_entry", v.sup_after_entry}};
}

}  // namespace

json default_scenario_json() {
  const ScooterParams p = ScooterParams::segway_es4();
  const UncertaintyConfig u = UncertaintyConfig::table_one();
  const SpeedProfile speed = SpeedProfile::paper_sinusoid();
  return {
      {"schema", kScenarioSchema},
      {"name", "scenario"},
      {"controller", "pd"},
      {"coupling_sign", "paper"},
      {"params", params_json(p)},
      {"gains", {{"kp", 300.0}, {"kd", 80.0}}},
      {"uncertainty",
       {{"enabled", false},
        {"speed_scale", u.speed_scale},
        {"steer_scale", u.steer_scale},
        {"mass", u.mass},
        {"com_height", u.com_height},
        {"com_offset", u.com_offset}}},
      {"path",
       {{"kind", "lemniscate"},
        {"scale", 15.0},
        {"steer", 0.0},
        {"file", ""},
        {"steer_rate_limit", nullptr}}},
      {"speed",
       {{"kind", "sinusoid"},
        {"offset", speed.offset},
        {"amplitude", speed.amplitude},
        {"frequency", speed.frequency},
        {"phase", "270 deg"},
        {"value", 0.0},
        {"file", ""}}},
      {"initial", {{"roll", "10 deg"}, {"roll_rate", 0.0}}},
      {"integration",
       {{"dt", 1e-3},
        {"horizon", 20.0},
        {"signal_dt", 1e-3},
        {"control_period", 0.0},
        {"stop_on_capsize", true}}},
  };
}

std::string paper_scenario_file_name(ControllerKind controller, bool uncertain) {
  std::string tag = controller == ControllerKind::flpd ? "pdfl" : "pd";
  if (controller == ControllerKind::none) tag = "none";
  if (uncertain) tag += "u";
  return "paper_scenario_" + tag + ".json";
}

json paper_scenario_json(ControllerKind controller, bool uncertain) {
  json doc = default_scenario_json();
  std::string name = paper_scenario_file_name(controller, uncertain);
  name.resize(name.size() - 5);
  doc["name"] = name;
  doc["controller"] = std::string(to_string(controller));
  doc["uncertainty"]["enabled"] = uncertain;
  return doc;
}

Scenario paper_scenario(ControllerKind controller, bool uncertain) {
  return scenario_from_json(paper_scenario_json(controller, uncertain));
}

json load_scenario_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open scenario file " + file.string());
  json patch;
  try {
    patch = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file " + file.string() + ": " + e.what());
  }
  if (!patch.is_object()) throw ConfigError("scenario file must hold a JSON object");
  if (!patch.contains("schema") || patch["schema"] != kScenarioSchema) {
    throw ConfigError("scenario file " + file.string() + " must declare schema \"" +
                      std::string(kScenarioSchema) + "\"");
  }
  json doc = default_scenario_json();
  // Reject keys the schema does not know before merging.
  const json flat_defaults = doc.flatten();
  const json flat_patch = patch.flatten();
  for (const auto& [key, value] : flat_patch.items()) {
    if (!flat_defaults.contains(key)) throw ConfigError("unknown scenario key " + key);
  }
  doc.merge_patch(patch);
  // merge_patch treats null as deletion; the rate limit uses null for "off".
  if (!doc["path"].contains("steer_rate_limit")) doc["path"]["steer_rate_limit"] = nullptr;
  return doc;
}

void apply_override(json& doc, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must be key=value, got '" + std::string(assignment) + "'");
  }
  const std::string pointer = to_pointer(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  const json::json_pointer ptr(pointer);
  if (!doc.contains(ptr)) throw ConfigError("unknown scenario key " + pointer);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json& target = doc[ptr];
  const bool angle = is_angle_key(pointer);
  bool ok = false;
  if (target.is_number()) {
    ok = value.is_number() || (angle && value.is_string());
  } else if (target.is_string()) {
    ok = value.is_string() || (angle && value.is_number());
    if (!ok && value.is_number()) {
      value = raw;
      ok = true;
    }
  } else if (target.is_boolean()) {
    ok = value.is_boolean();
  } else if (target.is_null()) {
    ok = value.is_null() || value.is_number();
  }
  if (!ok) {
    throw ConfigError("override " + pointer + ": expected " + std::string(target.type_name()) +
                      ", got '" + raw + "'");
  }
  if (angle) parse_angle(value);
  target = value;
}

double parse_angle(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) throw ConfigError("angle must be a number or a string with unit");
  const std::string text = value.get<std::string>();
  std::size_t used = 0;
  double number = 0.0;
  try {
    number = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad angle '" + text + "'");
  }
  std::string unit = text.substr(used);
  unit.erase(0, unit.find_first_not_of(' '));
  if (unit == "deg") return number * kDegree;
  if (unit == "rad" || unit.empty()) return number;
  throw ConfigError("unknown angle unit '" + unit + "' (use deg or rad)");
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.contains("schema") || doc["schema"] != kScenarioSchema) {
    throw ConfigError("scenario must declare schema \"" + std::string(kScenarioSchema) + "\"");
  }
  Scenario sc;
  try {
    sc.name = get_field<std::string>(doc, "/name");
    sc.controller = controller_from_string(get_field<std::string>(doc, "/controller"));
    sc.coupling_sign = coupling_sign_from_string(get_field<std::string>(doc, "/coupling_sign"));

    sc.actual.mass = get_field<double>(doc, "/params/mass");
    sc.actual.com_height = get_field<double>(doc, "/params/com_height");
    sc.actual.com_offset = get_field<double>(doc, "/params/com_offset");
    sc.actual.wheelbase = get_field<double>(doc, "/params/wheelbase");
    sc.actual.roll_inertia = get_field<double>(doc, "/params/roll_inertia");
    sc.actual.yaw_inertia = get_field<double>(doc, "/params/yaw_inertia");
    sc.actual.gravity = get_field<double>(doc, "/params/gravity");

    sc.gains.kp = get_field<double>(doc, "/gains/kp");
    sc.gains.kd = get_field<double>(doc, "/gains/kd");

    if (get_field<bool>(doc, "/uncertainty/enabled")) {
      sc.uncertainty.speed_scale = get_field<double>(doc, "/uncertainty/speed_scale");
      sc.uncertainty.steer_scale = get_field<double>(doc, "/uncertainty/steer_scale");
      sc.uncertainty.mass = get_field<double>(doc, "/uncertainty/mass");
      sc.uncertainty.com_height = get_field<double>(doc, "/uncertainty/com_height");
      sc.uncertainty.com_offset = get_field<double>(doc, "/uncertainty/com_offset");
    } else {
      sc.uncertainty = UncertaintyConfig::exact(sc.actual);
    }

    sc.initial_roll = angle_field(doc, "/initial/roll");
    sc.initial_roll_rate = get_field<double>(doc, "/initial/roll_rate");
    sc.dt = get_field<double>(doc, "/integration/dt");
    sc.horizon = get_field<double>(doc, "/integration/horizon");
    sc.control_period = get_field<double>(doc, "/integration/control_period");
    sc.stop_on_capsize = get_field<bool>(doc, "/integration/stop_on_capsize");
    const double signal_dt = get_field<double>(doc, "/integration/signal_dt");

    PathSpec path;
    const std::string path_kind = get_field<std::string>(doc, "/path/kind");
    if (path_kind == "lemniscate") {
      path = PathSpec::lemniscate(get_field<double>(doc, "/path/scale"));
    } else if (path_kind == "constant-steer") {
      path = PathSpec::constant_steer(angle_field(doc, "/path/steer"));
    } else if (path_kind == "waypoint-table") {
      path = PathSpec::waypoint_table(
          load_waypoints_csv(resolve(base_dir, get_field<std::string>(doc, "/path/file"))));
    } else if (path_kind == "signal-table") {
      path = PathSpec::signal_table(
          load_signal_csv(resolve(base_dir, get_field<std::string>(doc, "/path/file"))));
    } else {
      throw ConfigError("unknown path kind '" + path_kind + "'");
    }

    SpeedProfile speed;
    const std::string speed_kind = get_field<std::string>(doc, "/speed/kind");
    if (speed_kind == "paper-sinusoid") {
      speed = SpeedProfile::paper_sinusoid();
    } else if (speed_kind == "sinusoid") {
      speed.offset = get_field<double>(doc, "/speed/offset");
      speed.amplitude = get_field<double>(doc, "/speed/amplitude");
      speed.frequency = get_field<double>(doc, "/speed/frequency");
      speed.phase = angle_field(doc, "/speed/phase");
    } else if (speed_kind == "constant") {
      speed = SpeedProfile::constant(get_field<double>(doc, "/speed/value"));
    } else if (speed_kind == "table") {
      speed = SpeedProfile::from_table(
          load_speed_csv(resolve(base_dir, get_field<std::string>(doc, "/speed/file"))));
    } else {
      throw ConfigError("unknown speed kind '" + speed_kind + "'");
    }

    TraceOptions options;
    const json& limit = doc.at(json::json_pointer("/path/steer_rate_limit"));
    if (!limit.is_null()) options.steer_rate_limit = limit.get<double>();

    if (!(signal_dt > 0.0)) throw ConfigError("integration.signal_dt must be positive");
    const double trace_horizon = std::ceil(sc.horizon / signal_dt - 1e-9) * signal_dt;
    sc.trace = build_signal_trace(path, speed, sc.actual.wheelbase, trace_horizon, signal_dt,
                                  options);
    sc.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return sc;
}

std::vector<Waypoint> load_waypoints_csv(const std::filesystem::path& file) {
  std::vector<std::string> header;
  const auto rows = read_numeric_csv(file, header);
  const std::size_t cx = column(header, "x", file);
  const std::size_t cy = column(header, "y", file);
  const bool has_s = std::find(header.begin(), header.end(), "s") != header.end();
  const std::size_t cs = has_s ? column(header, "s", file) : 0;
  std::vector<Waypoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    Waypoint w;
    w.x = r[cx];
    w.y = r[cy];
    if (has_s) {
      w.s = r[cs];
    } else if (!out.empty()) {
      w.s = out.back().s + std::hypot(w.x - out.back().x, w.y - out.back().y);
    }
    out.push_back(w);
  }
  return out;
}

std::vector<SignalRow> load_signal_csv(const std::filesystem::path& file) {
  std::vector<std::string> header;
  const auto rows = read_numeric_csv(file, header);
  const std::size_t ct = column(header, "t", file);
  const std::size_t cv = column(header, "v", file);
  const std::size_t cd = column(header, "delta", file);
  std::vector<SignalRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r[ct], r[cv], r[cd]});
  return out;
}

std::vector<SpeedRow> load_speed_csv(const std::filesystem::path& file) {
  std::vector<std::string> header;
  const auto rows = read_numeric_csv(file, header);
  const std::size_t ct = column(header, "t", file);
  const std::size_t cv = column(header, "v", file);
  std::vector<SpeedRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r[ct], r[cv]});
  return out;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out(kTrajectoryCsvHeader);
  out += '\n';
  out.reserve(traj.samples.size() * 300);
  for (const TrajectorySample& s : traj.samples) {
    const double row[] = {s.t,        s.theta,     s.theta_dot, s.tau,       s.speed,
                          s.steer,    s.yaw_rate,  s.yaw_accel, s.coupling,  s.gravity,
                          s.amplitude, s.theta_bound, s.theta_dot_bound, s.v1, s.v2};
    bool first = true;
    for (double x : row) {
      if (!first) out += ',';
      out += format_double(x);
      first = false;
    }
    out += '\n';
  }
  return out;
}

json summary_json(const Scenario& sc, const Trajectory& traj) {
  const TrajectorySummary& s = traj.summary;
  const LyapunovCheck ly = lyapunov_sign_check(traj);
  return {
      {"schema", kSummarySchema},
      {"scenario", sc.name},
      {"controller", to_string(sc.controller)},
      {"coupling_sign", to_string(sc.coupling_sign)},
      {"band_amplitude", sc.controller == ControllerKind::flpd ? "U_tilde" : "U"},
      {"initial_roll", sc.initial_roll},
      {"initial_roll_rate", sc.initial_roll_rate},
      {"dt", sc.dt},
      {"horizon", sc.horizon},
      {"u_max", s.u_max},
      {"true_u_max", s.true_u_max},
      {"theta_bound", s.theta_bound},
      {"theta_dot_bound", s.theta_dot_bound},
      {"lambda", s.lambda},
      {"lyapunov_k", s.lyapunov_k},
      {"sup_theta", s.sup_theta},
      {"sup_theta_dot", s.sup_theta_dot},
      {"sup_tau", s.sup_tau},
      {"max_speed_rate", s.max_speed_rate},
      {"capsized", s.capsized},
      {"capsize_time", s.capsize_time},
      {"end_time", s.end_time},
      {"verdicts",
       {{"theta", verdict_json(check_bounds(traj, BoundKind::theta))},
        {"theta_dot", verdict_json(check_bounds(traj, BoundKind::theta_dot))}}},
      {"lyapunov",
       {{"v1_samples_outside", ly.v1_outside},
        {"v1_violations", ly.v1_violations},
        {"v2_samples_outside", ly.v2_outside},
        {"v2_violations", ly.v2_violations}}},
  };
}

void write_text_file(const std::filesystem::path& file, std::string_view contents) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace scooter
