#include "scooter/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "scooter/scenario_io.hpp"

namespace scooter {

using nlohmann::json;

std::size_t SweepGrid::cell_count() const {
  if (axes.empty()) return 1;
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::vector<std::string> SweepGrid::cell_overrides(std::size_t index) const {
  std::vector<std::string> out(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    const auto& axis = axes[i];
    const std::size_t pick = index % axis.values.size();
    index /= axis.values.size();
    const json& v = axis.values[pick];
    out[i] = axis.key + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
  }
  return out;
}

SweepGrid grid_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("schema", "") != "scooter-grid/1") {
    throw ConfigError("grid must declare schema \"scooter-grid/1\"");
  }
  if (!doc.contains("axes") || !doc["axes"].is_object()) {
    throw ConfigError("grid needs an \"axes\" object");
  }
  SweepGrid grid;
  for (const auto& [key, values] : doc["axes"].items()) {
    if (!values.is_array() || values.empty()) {
      throw ConfigError("grid axis '" + key + "' must be a non-empty array");
    }
    grid.axes.push_back({key, std::vector<json>(values.begin(), values.end())});
  }
  return grid;
}

std::vector<SweepCell> run_sweep(const json& base_scenario, const SweepGrid& grid,
                                 unsigned threads) {
  const std::size_t n = grid.cell_count();
  if (n == 0) throw ConfigError("sweep grid is empty");
  std::vector<SweepCell> cells(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SweepCell& cell = cells[i];
      cell.index = i;
      cell.overrides = grid.cell_overrides(i);
      try {
        json doc = base_scenario;
        for (const auto& o : cell.overrides) apply_override(doc, o);
        const Scenario sc = scenario_from_json(doc);
        const Trajectory traj = run(sc);
        cell.summary = traj.summary;
        cell.theta = check_bounds(traj, BoundKind::theta);
        cell.theta_dot = check_bounds(traj, BoundKind::theta_dot);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  return cells;
}

std::string sweep_csv(const SweepGrid& grid, const std::vector<SweepCell>& cells) {
  std::string out = "cell";
  for (const auto& a : grid.axes) out += "," + a.key;
  out +=
      ",ok,u_max,theta_bound,theta_dot_bound,sup_theta,sup_theta_after_entry,theta_entered,"
      "theta_contained,theta_dot_contained,capsized,error\n";
  for (const SweepCell& c : cells) {
    out += std::to_string(c.index);
    for (const auto& o : c.overrides) out += "," + o.substr(o.find('=') + 1);
    out += c.ok ? ",1" : ",0";
    const double nums[] = {c.summary.u_max, c.summary.theta_bound, c.summary.theta_dot_bound,
                           c.summary.sup_theta, c.theta.sup_after_entry};
    for (double x : nums) out += "," + format_double(x);
    out += c.theta.entered ? ",1" : ",0";
    out += c.theta.contained ? ",1" : ",0";
    out += c.theta_dot.contained ? ",1" : ",0";
    out += c.summary.capsized ? ",1" : ",0";
    std::string err = c.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out += "," + err + "\n";
  }
  return out;
}

}  // namespace scooter
