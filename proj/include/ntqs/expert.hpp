#pragma once

#include "ntqs/sampling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ntqs {

enum class PlannerKind : std::uint8_t { GridAStar, RrtStar };

std::string_view to_string(PlannerKind kind) noexcept;
PlannerKind parse_planner_kind(std::string_view name);

/// Classical planner settings. Grid fields apply to GridAStar, tree fields
/// to RrtStar; both smooth their output.
struct ExpertConfig {
    PlannerKind kind = PlannerKind::GridAStar;
    double cell_size = 0.25;

    int iterations = 2000;
    double step_size = 1.0;
    double goal_bias = 0.05;
    /// Rewire radius r(n) = min(rewire_gamma * (log n / n)^(1/d), rewire_max).
    double rewire_gamma = 6.0;
    double rewire_max = 1.5;

    std::uint64_t seed = 1;
    int smoothing_rounds = 100;
    /// 0 selects default_resolution() for the robot.
    double resolution = 0.0;
};

void validate_expert_config(const ExpertConfig& cfg);

/// GridAStar for point robots, RrtStar otherwise.
ExpertConfig default_expert_config(const Environment& env);

struct ExpertResult {
    bool success = false;
    Path path;
    double cost = 0.0;
    /// Cost of the planner's path before smoothing.
    double raw_cost = 0.0;
    std::string failure;
    /// RrtStar only: best goal-reaching cost after each iteration (inf until found).
    std::vector<double> cost_trace;
};

/// Near-optimal path for `q`. Returns success = false when no path is found
/// within the budget. Throws InputError if start or goal is invalid.
/// Deterministic given cfg.seed.
ExpertResult solve_query(const Query& q, const InflatedView& view, const ExpertConfig& cfg);

/// Random shortcutting: each round picks two waypoint indices and replaces the
/// stretch between them by a straight hop when steer_to allows it and the hop
/// is no longer than the stretch. Endpoints are kept. `trace`, when given,
/// receives the cost after every round.
Path shortcut_smooth(const Path& path, const InflatedView& view, int rounds, std::uint64_t seed, double resolution,
                     std::vector<double>* trace = nullptr);

/// Deterministic pass that jumps from each kept waypoint to the farthest later
/// waypoint it can steer to.
Path greedy_shortcut(const Path& path, const InflatedView& view, double resolution);

/// Occupancy grid for 8-connected search. Cell (x, y) is at blocked[y * width + x].
struct OccupancyGrid {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> blocked;

    bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }
    bool is_blocked(int x, int y) const noexcept { return blocked[static_cast<std::size_t>(y * width + x)] != 0; }
};

using GridCell = std::pair<int, int>;

struct GridPath {
    bool found = false;
    std::vector<GridCell> cells;
    double cost = 0.0;
};

/// A* over an occupancy grid: unit straight moves, sqrt(2) diagonals that may
/// not cut a blocked corner, Euclidean heuristic, ties broken toward larger g.
GridPath grid_astar(const OccupancyGrid& grid, GridCell start, GridCell goal);

} // namespace ntqs
