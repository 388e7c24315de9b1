#pragma once

#include "ntqs/pnet.hpp"

#include <functional>
#include <string_view>

namespace ntqs {

/// Next-state proposal: (current, goal) -> next.
using Predictor = std::function<Configuration(const Configuration&, const Configuration&)>;

Predictor model_predictor(const MlpModel& model);

struct PlannerConfig {
    int n_plan = 80;
    /// 0 selects default_resolution() for the robot.
    double resolution = 0.0;
    bool use_steer = true;
    /// Goal tolerance when steering is disabled.
    double delta = 1.0;
    int replan_depth = 2;
    int replan_segment_cap = 20;
};

void validate_planner_config(const PlannerConfig& cfg);

enum class PlanFailure : std::uint8_t {
    None = 0,
    NoGoalReached,
    InfeasibleAfterReplan,
    ReplanExhausted,
    /// Steering disabled: the rollout reached the goal but a hop collides.
    Infeasible,
};

std::string_view to_string(PlanFailure f) noexcept;

struct PlanResult {
    bool success = false;
    PlanFailure failure = PlanFailure::None;
    Path path;
    double cost = 0.0;
    int iterations = 0;
    int replans = 0;
    double wall_ms = 0.0;
};

/// Greedy steering plus learned rollout, then feasibility check and neural
/// repair. Without steering, the rollout stops once within cfg.delta of the
/// goal, the goal is appended, and no repair is attempted. `env` should be
/// the unpadded evaluation view.
PlanResult plan(const Query& q, const InflatedView& env, const Predictor& predict, const PlannerConfig& cfg);

/// Repairs an infeasible path: drops invalid waypoints, re-rolls every
/// blocked hop toward its successor (at most cfg.replan_segment_cap steps)
/// and recurses up to cfg.replan_depth times. A feasible input is returned
/// unchanged. `replans` counts repair rounds.
PlanResult replan(const Path& path, const InflatedView& env, const Predictor& predict, const PlannerConfig& cfg);

} // namespace ntqs
