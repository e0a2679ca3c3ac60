#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "scooter/sim.hpp"

namespace scooter {

/// Cartesian grid of scenario overrides. Each axis holds the values to try
/// for one dotted scenario key ("gains.kd", "uncertainty.speed_scale", ...).
/// Cells are ordered with the last axis varying fastest.
struct SweepAxis {
  std::string key;
  std::vector<nlohmann::json> values;
};

struct SweepGrid {
  std::vector<SweepAxis> axes;

  std::size_t cell_count() const;
  /// Overrides ("key=value") for cell `index`.
  std::vector<std::string> cell_overrides(std::size_t index) const;
};

/// Grid file: {"schema": "scooter-grid/1", "axes": {"gains.kd": [40, 80]}}.
/// Axis order follows the file.
SweepGrid grid_from_json(const nlohmann::json& doc);

struct SweepCell {
  std::size_t index = 0;
  std::vector<std::string> overrides;
  bool ok = false;
  std::string error;
  TrajectorySummary summary;
  BoundVerdict theta;
  BoundVerdict theta_dot;
};

/// Runs every cell on `threads` workers (0: hardware concurrency). A cell
/// that fails to configure records the error; capsized cells are kept.
std::vector<SweepCell> run_sweep(const nlohmann::json& base_scenario, const SweepGrid& grid,
                                 unsigned threads = 0);

std::string sweep_csv(const SweepGrid& grid, const std::vector<SweepCell>& cells);

}  // namespace scooter
