#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scooter/planner.hpp"
#include "scooter/sim.hpp"

namespace scooter {

inline constexpr std::string_view kScenarioSchema = "scooter-scenario/1";
inline constexpr std::string_view kSummarySchema = "scooter-summary/1";

/// Invalid scenario, grid or override.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complete scenario document with every key present. Files and overrides
/// are merged onto this, so any key absent here is rejected.
nlohmann::json default_scenario_json();

/// One of the four bundled simulation-study setups.
nlohmann::json paper_scenario_json(ControllerKind controller, bool uncertain);
Scenario paper_scenario(ControllerKind controller, bool uncertain);

/// File name of the bundled scenario, e.g. "paper_scenario_pdflu.json".
std::string paper_scenario_file_name(ControllerKind controller, bool uncertain);

/// Reads a scenario file and merges it onto the defaults.
nlohmann::json load_scenario_json(const std::filesystem::path& file);

/// Applies "dotted.key=value". The key must already exist and the value
/// must have the same JSON type (angles also accept "<number> deg|rad").
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Builds a validated Scenario, loading table files relative to `base_dir`.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Radians from a number (already radians) or a "<number> deg" / "<number> rad" string.
double parse_angle(const nlohmann::json& value);

std::vector<Waypoint> load_waypoints_csv(const std::filesystem::path& file);
std::vector<SignalRow> load_signal_csv(const std::filesystem::path& file);
std::vector<SpeedRow> load_speed_csv(const std::filesystem::path& file);

inline constexpr std::string_view kTrajectoryCsvHeader =
    "t,theta,theta_dot,tau,v,delta,psi_dot,psi_ddot,C,G,U,theta_bound,theta_dot_bound,V1,V2";

/// 17-significant-digit CSV of the trajectory.
std::string trajectory_csv(const Trajectory& traj);

/// printf("%.17g").
std::string format_double(double value);

nlohmann::json summary_json(const Scenario& sc, const Trajectory& traj);

void write_text_file(const std::filesystem::path& file, std::string_view contents);

}  // namespace scooter
