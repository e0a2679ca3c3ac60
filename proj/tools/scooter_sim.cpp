// Command-line driver: simulate a scenario, run the acceptance suite, or
// sweep a scenario over a parameter grid.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scooter/acceptance.hpp"
#include "scooter/scenario_io.hpp"
#include "scooter/sim.hpp"
#include "scooter/svg_plot.hpp"
#include "scooter/sweep.hpp"

namespace fs = std::filesystem;
using namespace scooter;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailed = 1,
  kConfigError = 2,
  kIoError = 3,
  kCapsized = 4,
};

struct SimulateArgs {
  std::string scenario;
  std::string out = ".";
  std::string emit = "csv,svg,summary";
  std::vector<std::string> overrides;
};

struct VerifyArgs {
  std::string filter;
  std::vector<std::string> overrides;
};

struct SweepArgs {
  std::string scenario;
  std::string grid;
  std::string out = ".";
  unsigned threads = 0;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

int cmd_simulate(const SimulateArgs& args) {
  bool want_csv = false;
  bool want_svg = false;
  bool want_summary = false;
  for (const auto& e : split_csv(args.emit)) {
    if (e == "csv") {
      want_csv = true;
    } else if (e == "svg") {
      want_svg = true;
    } else if (e == "summary") {
      want_summary = true;
    } else {
      throw ConfigError("unknown --emit entry '" + e + "'");
    }
  }

  const fs::path file(args.scenario);
  nlohmann::json doc = load_scenario_json(file);
  for (const auto& o : args.overrides) apply_override(doc, o);
  const Scenario sc = scenario_from_json(doc, file.parent_path());
  const Trajectory traj = run(sc);

  const fs::path out(args.out);
  ensure_dir(out);
  if (want_csv) write_text_file(out / (sc.name + ".csv"), trajectory_csv(traj));
  if (want_svg) write_text_file(out / (sc.name + ".svg"), trajectory_svg(traj, sc.name));
  if (want_summary) {
    write_text_file(out / (sc.name + ".summary.json"), summary_json(sc, traj).dump(2) + "\n");
  }

  const BoundVerdict th = check_bounds(traj, BoundKind::theta);
  std::printf("%s: controller=%s U_max=%.6g theta_bound=%.6g contained=%s sup|theta|=%.6g\n",
              sc.name.c_str(), std::string(to_string(sc.controller)).c_str(),
              traj.summary.u_max, traj.summary.theta_bound, th.contained ? "true" : "false",
              traj.summary.sup_theta);
  if (traj.summary.capsized) {
    std::fprintf(stderr, "capsized at t=%.6g s\n", traj.summary.capsize_time);
    return kCapsized;
  }
  return kOk;
}

int cmd_verify(const VerifyArgs& args) {
  AcceptanceOptions opt;
  opt.filter = args.filter;
  opt.overrides = args.overrides;
  const auto results = run_acceptance(opt);
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %2d %-32s %s (%.3f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    if (!r.passed) ++failures;
  }
  const auto oracle = euler_lagrange_check().matched();
  std::printf("coupling sign matched by the Euler-Lagrange oracle: %s\n",
              oracle ? std::string(to_string(*oracle)).c_str() : "none");
  if (results.empty()) {
    std::fprintf(stderr, "no criterion matches filter '%s'\n", args.filter.c_str());
    return kFailed;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - failures, results.size());
  return failures == 0 ? kOk : kFailed;
}

int cmd_sweep(const SweepArgs& args) {
  const fs::path scenario_file(args.scenario);
  nlohmann::json base = load_scenario_json(scenario_file);
  // Table paths are resolved against the scenario file before cells are built.
  for (const char* key : {"/path/file", "/speed/file"}) {
    const nlohmann::json::json_pointer ptr(key);
    const std::string f = base.at(ptr).get<std::string>();
    if (!f.empty() && fs::path(f).is_relative()) {
      base[ptr] = (scenario_file.parent_path() / f).string();
    }
  }
  std::ifstream grid_in(args.grid);
  if (!grid_in) throw ConfigError("cannot open grid file " + args.grid);
  nlohmann::json grid_doc;
  try {
    grid_doc = nlohmann::json::parse(grid_in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("grid file " + args.grid + ": " + e.what());
  }
  const SweepGrid grid = grid_from_json(grid_doc);
  const auto cells = run_sweep(base, grid, args.threads);

  const fs::path out(args.out);
  ensure_dir(out);
  write_text_file(out / "sweep.csv", sweep_csv(grid, cells));
  std::size_t failed = 0;
  for (const auto& c : cells) failed += c.ok ? 0 : 1;
  std::printf("%zu cells, %zu failed to configure\n", cells.size(), failed);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-balancing e-scooter roll dynamics simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its outputs");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_option("--emit", sim.emit, "Comma-separated subset of csv,svg,summary");
  simulate->add_option("--set", sim.overrides, "Override a scenario key (dotted.key=value)");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--filter", ver.filter, "Criterion id or name substring");
  verify->add_option("--set", ver.overrides, "Override applied to the bundled scenarios");

  SweepArgs swp;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a parameter grid");
  sweep->add_option("--scenario", swp.scenario, "Base scenario JSON file")->required();
  sweep->add_option("--grid", swp.grid, "Grid JSON file")->required();
  sweep->add_option("--out", swp.out, "Output directory");
  sweep->add_option("--threads", swp.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*verify) return cmd_verify(ver);
    if (*sweep) return cmd_sweep(swp);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kIoError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailed;
  }
  return kOk;
}
