#pragma once

#include "ntqs/config_space.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace ntqs {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Workspace {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    bool contains(double x, double y) const noexcept { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
    friend bool operator==(const Workspace&, const Workspace&) = default;
};

/// Axis-aligned rectangle given by centre and half extents.
struct Obstacle {
    double cx = 0.0;
    double cy = 0.0;
    double half_w = 0.0;
    double half_h = 0.0;

    friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

struct PointRobot {
    friend bool operator==(const PointRobot&, const PointRobot&) = default;
};

/// Convex polygon in the body frame, counter-clockwise.
struct RigidBody {
    std::vector<Vec2> vertices;

    friend bool operator==(const RigidBody&, const RigidBody&) = default;
};

/// Planar serial arm. Link k's absolute angle is the sum of joints 0..k.
struct NLinkArm {
    std::vector<double> link_lengths;
    Vec2 base;
    /// When false (default) every link must stay inside the workspace.
    bool may_leave_workspace = false;

    std::size_t links() const noexcept { return link_lengths.size(); }
    friend bool operator==(const NLinkArm&, const NLinkArm&) = default;
};

using RobotModel = std::variant<PointRobot, RigidBody, NLinkArm>;

ConfigKind config_kind(const RobotModel& robot) noexcept;
std::size_t config_dim(const RobotModel& robot) noexcept;

struct Environment {
    std::string name;
    Workspace workspace;
    std::vector<Obstacle> obstacles;
    RobotModel robot = PointRobot{};
    /// Radians-to-world-units weight of the SE(2) heading in the metric.
    double w_theta = 1.0;

    ConfigKind kind() const noexcept { return config_kind(robot); }
    std::size_t dim() const noexcept { return config_dim(robot); }
    double distance(const Configuration& a, const Configuration& b) const { return config_distance(a, b, w_theta); }

    friend bool operator==(const Environment&, const Environment&) = default;
};

/// Checks every structural invariant and that free space is non-empty
/// (a valid configuration is found within a bounded number of samples).
/// Throws ValidationError naming the offending field.
void validate_environment(const Environment& env);

/// Parses the JSON environment schema (comments allowed). Throws ParseError
/// on malformed input and ValidationError on invariant violations.
Environment parse_environment(const std::string& text);
Environment load_environment(const std::filesystem::path& path);

/// Serializes with full double precision so a load reproduces every field.
std::string environment_to_json(const Environment& env);
void save_environment(const Environment& env, const std::filesystem::path& path);

/// Checks `c` has the kind and dimension the robot expects.
void require_config_for(const Environment& env, const Configuration& c);

/// The environments shipped with the tool, by task family.
std::vector<Environment> bundled_environments();

/// Point-robot 20x20 world split by a wall at x in [9, 11], y in [0, 15].
Environment wall_environment();

/// Point-robot 20x20 world with no obstacles.
Environment empty_environment();

} // namespace ntqs
