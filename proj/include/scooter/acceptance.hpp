#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scooter/dynamics.hpp"

namespace scooter {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Substring matched against "<id>" or the criterion name; empty runs all.
  std::string filter;
  /// Scenario overrides applied to every scenario-driven criterion.
  std::vector<std::string> overrides;
};

/// Runs the acceptance criteria in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// Worst relative mismatch between the numeric Euler-Lagrange residual and
/// the closed form M theta_ddot - C cos(theta) - G sin(theta), per coupling
/// sign, over random states. The scale of each comparison is |M theta_ddot|
/// + |C cos(theta)| + |G sin(theta)|.
struct EulerLagrangeReport {
  std::size_t samples = 0;
  double tolerance = 0.0;
  double worst_paper = 0.0;
  double worst_oracle = 0.0;
  bool paper_matches = false;
  bool oracle_matches = false;

  /// The sign variant that matched, when exactly one did.
  std::optional<CouplingSign> matched() const;
};

EulerLagrangeReport euler_lagrange_check(std::size_t samples = 1000, std::uint64_t seed = 20240611,
                                         double tolerance = 1e-5);

}  // namespace scooter
