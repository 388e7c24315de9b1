#pragma once

#include "ntqs/sampling.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ntqs {

struct SvgOverlays {
    std::string title;
    /// Draw obstacle outlines grown by this much (dashed); 0 draws none.
    double padding = 0.0;
    std::vector<Path> paths;
    /// Start/goal scatter (starts green, goals blue).
    std::vector<Query> queries;
    /// Extra robot placements drawn as footprints (rigid body) or link chains (arm).
    std::vector<Configuration> poses;
};

/// Deterministic SVG of the workspace, obstacles and overlays. Waypoint
/// coordinates of every path are embedded as JSON in <metadata>. Arm
/// configurations are drawn in the workspace via forward kinematics; query
/// scatter for arms marks end-effector positions.
std::string render_svg(const Environment& env, const SvgOverlays& overlays);

void write_svg(const Environment& env, const SvgOverlays& overlays, const std::filesystem::path& path);

} // namespace ntqs
