#pragma once

#include "ntqs/environment.hpp"

#include <vector>

namespace ntqs {

/// An environment whose obstacles are grown by `padding` in both half
/// extents. The workspace boundary is never inflated.
class InflatedView {
public:
    explicit InflatedView(const Environment& env, double padding = 0.0);
    /// The view keeps a reference to the environment, so temporaries are refused.
    InflatedView(Environment&&, double = 0.0) = delete;

    const Environment& env() const noexcept { return *env_; }
    double padding() const noexcept { return padding_; }
    const std::vector<Obstacle>& obstacles() const noexcept { return inflated_; }

private:
    const Environment* env_;
    double padding_;
    std::vector<Obstacle> inflated_;
};

struct Segment {
    Vec2 a;
    Vec2 b;
};

/// Link segments of the arm, base outward. Throws DimensionError when the
/// joint count does not match the arm.
std::vector<Segment> forward_kinematics(const Configuration& joints, const NLinkArm& arm);

/// Exact segment versus axis-aligned box test (slab clipping). Touching the
/// boundary counts as a hit.
bool segment_hits_obstacle(Vec2 p, Vec2 q, const Obstacle& obs, double padding);

/// Robot polygon placed at a pose, world frame.
std::vector<Vec2> place_polygon(const RigidBody& body, const Configuration& pose);

/// Convex polygon versus axis-aligned box by separating axes; touching counts.
bool polygon_hits_obstacle(const std::vector<Vec2>& polygon, const Obstacle& box);

/// True iff `c` lies in free space: inside the workspace and clear of every
/// inflated obstacle (boundary contact is a collision). Throws DimensionError
/// if `c` does not match the robot model.
bool is_valid(const Configuration& c, const InflatedView& view);

} // namespace ntqs
