#pragma once

#include <string>
#include <string_view>

#include "scooter/sim.hpp"

namespace scooter {

/// Standalone SVG with three stacked panels: roll angle, roll rate and
/// torque over time. The first two carry the +/- bound bands from the
/// trajectory summary.
std::string trajectory_svg(const Trajectory& traj, std::string_view title);

}  // namespace scooter
