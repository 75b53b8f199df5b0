#pragma once

#include <span>
#include <string>

#include "salodom/odometry.hpp"

namespace salodom {

struct NamedTrajectory {
    std::string name;
    const Trajectory* trajectory = nullptr;
};

struct PlotOptions {
    int width = 800;
    int height = 800;
    std::string title;
};

/// Top-down (x, z) overlay of trajectories as SVG polylines with axis ticks.
/// Output depends only on the inputs, so it can be snapshot-tested.
std::string render_trajectory_svg(std::span<const NamedTrajectory> trajectories, const PlotOptions& options = {});

}  // namespace salodom
