#include "ntqs/neural_planner.hpp"

#include "ntqs/error.hpp"
#include "ntqs/sampling.hpp"

#include <chrono>

namespace ntqs {

Predictor model_predictor(const MlpModel& model) {
    return [&model](const Configuration& current, const Configuration& goal) { return forward(model, current, goal); };
}

void validate_planner_config(const PlannerConfig& cfg) {
    if (cfg.n_plan < 1) throw ValidationError("planner.n_plan", "must be >= 1");
    if (cfg.resolution < 0.0) throw ValidationError("planner.resolution", "must be >= 0");
    if (!cfg.use_steer && !(cfg.delta > 0.0)) throw ValidationError("planner.delta", "must be > 0 without steering");
    if (cfg.replan_depth < 0) throw ValidationError("planner.replan_depth", "must be >= 0");
    if (cfg.replan_segment_cap < 1) throw ValidationError("planner.replan_segment_cap", "must be >= 1");
}

std::string_view to_string(PlanFailure f) noexcept {
    switch (f) {
    case PlanFailure::None: return "none";
    case PlanFailure::NoGoalReached: return "no-goal-reached";
    case PlanFailure::InfeasibleAfterReplan: return "infeasible-after-replan";
    case PlanFailure::ReplanExhausted: return "replan-exhausted";
    case PlanFailure::Infeasible: return "infeasible";
    }
    return "unknown";
}

namespace {

/// Greedy-steer rollout from `from` toward `to`. Appends the predicted
/// waypoints (and `to` once connected) to `out`; returns whether `to` was reached.
bool steer_rollout(const Configuration& from, const Configuration& to, const InflatedView& env, const Predictor& predict,
                   int cap, double res, Path& out, int& iterations) {
    Configuration end = from;
    for (int i = 0; i < cap; ++i) {
        ++iterations;
        if (steer_to(end, to, env, res)) {
            out.push_back(to);
            return true;
        }
        end = predict(end, to);
        out.push_back(end);
    }
    return false;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

PlanResult repair(Path path, const InflatedView& env, const Predictor& predict, const PlannerConfig& cfg, double res) {
    PlanResult r;
    if (path_feasible(path, env, res)) {
        r.success = true;
        r.path = std::move(path);
        r.cost = path_cost(r.path, env.env().w_theta);
        return r;
    }
    for (int round = 0; round < cfg.replan_depth; ++round) {
        ++r.replans;
        Path kept;
        for (const auto& w : path)
            if (is_valid(w, env)) kept.push_back(w);
        Path stitched{kept.front()};
        for (std::size_t i = 1; i < kept.size(); ++i) {
            const Configuration& u = kept[i - 1];
            const Configuration& v = kept[i];
            if (steer_to(u, v, env, res)) {
                stitched.push_back(v);
                continue;
            }
            if (!steer_rollout(u, v, env, predict, cfg.replan_segment_cap, res, stitched, r.iterations))
                stitched.push_back(v);  // keep the path closed; the next round retries from the valid prefix
        }
        path = std::move(stitched);
        if (path_feasible(path, env, res)) {
            r.success = true;
            r.path = std::move(path);
            r.cost = path_cost(r.path, env.env().w_theta);
            return r;
        }
    }
    r.failure = PlanFailure::ReplanExhausted;
    r.path = std::move(path);
    return r;
}

} // namespace

PlanResult replan(const Path& path, const InflatedView& env, const Predictor& predict, const PlannerConfig& cfg) {
    validate_planner_config(cfg);
    if (path.size() < 2) throw InputError("replan needs a path with at least two waypoints");
    if (!is_valid(path.front(), env) || !is_valid(path.back(), env))
        throw InputError("replan needs valid endpoints");
    const auto t0 = std::chrono::steady_clock::now();
    PlanResult r = repair(path, env, predict, cfg, effective_resolution(cfg.resolution, env.env()));
    r.wall_ms = elapsed_ms(t0);
    return r;
}

PlanResult plan(const Query& q, const InflatedView& env, const Predictor& predict, const PlannerConfig& cfg) {
    validate_planner_config(cfg);
    require_config_for(env.env(), q.start);
    require_config_for(env.env(), q.goal);
    if (!is_valid(q.start, env) || !is_valid(q.goal, env)) throw InputError("planning query endpoints must be valid");
    const auto t0 = std::chrono::steady_clock::now();
    const double res = effective_resolution(cfg.resolution, env.env());

    PlanResult r;
    Path path{q.start};
    bool reached = false;
    for (int i = 0; i < cfg.n_plan; ++i) {
        ++r.iterations;
        if (cfg.use_steer ? steer_to(path.back(), q.goal, env, res) : env.env().distance(path.back(), q.goal) <= cfg.delta) {
            path.push_back(q.goal);
            reached = true;
            break;
        }
        path.push_back(predict(path.back(), q.goal));
    }

    if (!reached) {
        r.failure = PlanFailure::NoGoalReached;
        r.path = std::move(path);
    } else if (path_feasible(path, env, res)) {
        r.success = true;
        r.path = std::move(path);
        r.cost = path_cost(r.path, env.env().w_theta);
    } else if (!cfg.use_steer) {
        r.failure = PlanFailure::Infeasible;
        r.path = std::move(path);
    } else {
        PlanResult fixed = repair(std::move(path), env, predict, cfg, res);
        fixed.iterations += r.iterations;
        if (!fixed.success) fixed.failure = PlanFailure::InfeasibleAfterReplan;
        r = std::move(fixed);
    }
    r.wall_ms = elapsed_ms(t0);
    return r;
}

} // namespace ntqs
