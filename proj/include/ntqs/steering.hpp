#pragma once

#include "ntqs/collision.hpp"

#include <vector>

namespace ntqs {

/// Ordered waypoints; consecutive pairs are joined by straight-line steering.
using Path = std::vector<Configuration>;

/// 0.05 world units for point and SE(2) robots, 0.02 rad for arms.
double default_resolution(ConfigKind kind) noexcept;

/// Number of equal segments the steering check splits a motion of length
/// `distance` into: the smallest power of two whose step is <= resolution.
/// Powers of two make the sample sets of successive halvings nested.
std::size_t steer_segments(double distance, double resolution);

/// Straight-line local connector: true iff every sample along a -> b
/// (endpoints included, spacing at most `resolution`) is valid.
/// The result is symmetric in a and b.
bool steer_to(const Configuration& a, const Configuration& b, const InflatedView& view, double resolution);

/// Sum of metric lengths of consecutive waypoint pairs; 0 for one waypoint.
double path_cost(const Path& path, double w_theta = 1.0);

/// True iff the path has >= 2 waypoints and every hop passes steer_to.
bool path_feasible(const Path& path, const InflatedView& view, double resolution);

} // namespace ntqs
