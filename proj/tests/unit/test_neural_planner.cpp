#include "support.hpp"

#include <doctest.h>

using namespace ntqs;

namespace {

/// Predictor that walks a fixed path: from a waypoint of `path` it proposes
/// the following one, anywhere else it stays put.
Predictor path_follower(Path path) {
    return [path = std::move(path)](const Configuration& current, const Configuration&) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            if (path[i] == current) return path[i + 1];
        return current;
    };
}

Predictor stay_put() {
    return [](const Configuration& c, const Configuration&) { return c; };
}

} // namespace

TEST_SUITE("neural_planner") {

TEST_CASE("trivial query connects in one iteration") {
    const Environment env = wall_environment();
    const InflatedView v(env);
    const Query q{Configuration::point(2, 18), Configuration::point(18, 18)};
    int calls = 0;
    const Predictor p = [&](const Configuration& c, const Configuration&) {
        ++calls;
        return c;
    };
    const auto r = plan(q, v, p, PlannerConfig{});
    CHECK(r.success);
    CHECK(r.iterations == 1);
    CHECK(calls == 0);
    CHECK(r.path.size() == 2);
    CHECK(r.cost == 16.0);
    CHECK(r.failure == PlanFailure::None);
}

TEST_CASE("an expert-following predictor reproduces the expert") {
    const Environment env = wall_environment();
    const InflatedView v(env);
    const Query q{Configuration::point(2, 2), Configuration::point(18, 2)};
    const auto expert = solve_query(q, v, ExpertConfig{});
    REQUIRE(expert.success);
    const auto r = plan(q, v, path_follower(expert.path), PlannerConfig{});
    REQUIRE(r.success);
    CHECK(r.replans == 0);
    CHECK(r.cost <= expert.cost + 1e-9);
    CHECK(r.cost / expert.cost == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(path_feasible(r.path, v, 0.05));
    CHECK(r.iterations <= static_cast<int>(expert.path.size()));
}

TEST_CASE("rollout stops after the planning budget") {
    const Environment env = wall_environment();
    const InflatedView v(env);
    PlannerConfig cfg;
    cfg.n_plan = 12;
    const Query q{Configuration::point(2, 2), Configuration::point(18, 2)};
    const auto r = plan(q, v, stay_put(), cfg);
    CHECK_FALSE(r.success);
    CHECK(r.failure == PlanFailure::NoGoalReached);
    CHECK(r.iterations == 12);
    CHECK(r.path.size() <= static_cast<std::size_t>(cfg.n_plan) + 1);

    cfg.use_steer = false;
    cfg.delta = 1.0;
    const auto s = plan(q, v, stay_put(), cfg);
    CHECK(s.failure == PlanFailure::NoGoalReached);
    CHECK(s.path.size() <= static_cast<std::size_t>(cfg.n_plan) + 1);
}

TEST_CASE("without steering the goal must come within delta") {
    const Environment env = wall_environment();
    const InflatedView v(env);
    PlannerConfig cfg;
    cfg.use_steer = false;
    cfg.delta = 1.0;
    // Trivial query, yet the straight connection is not taken.
    const Query q{Configuration::point(2, 18), Configuration::point(18, 18)};
    Path walk{q.start};
    for (int k = 1; k <= 15; ++k) walk.push_back(Configuration::point(2 + k, 18));
    const auto r = plan(q, v, path_follower(walk), cfg);
    REQUIRE(r.success);
    CHECK(r.iterations == 16);
    CHECK(r.path.back() == q.goal);
    CHECK(r.path.size() == 17);

    // Stepping straight through the wall reaches the goal but is infeasible,
    // and no repair is attempted.
    const Query blocked{Configuration::point(2, 2), Configuration::point(18, 2)};
    Path through{blocked.start};
    for (int k = 1; k <= 15; ++k) through.push_back(Configuration::point(2 + k, 2));
    const auto s = plan(blocked, v, path_follower(through), cfg);
    CHECK_FALSE(s.success);
    CHECK(s.failure == PlanFailure::Infeasible);
    CHECK(s.replans == 0);

    cfg.delta = 0;
    CHECK_THROWS_AS(plan(q, v, stay_put(), cfg), ValidationError);
}

TEST_CASE("replanning repairs blocked hops") {
    const Environment env = wall_environment();
    const InflatedView v(env);
    const Path detour{Configuration::point(8.5, 2), Configuration::point(8.5, 16), Configuration::point(11.5, 16),
                      Configuration::point(11.5, 2)};
    const Path broken{Configuration::point(2, 2), Configuration::point(10, 10), Configuration::point(18, 2)};

    // A feasible path comes back unchanged.
    const auto same = replan(detour, v, stay_put(), PlannerConfig{});
    CHECK(same.success);
    CHECK(same.path == detour);
    CHECK(same.replans == 0);

    // The invalid middle waypoint is dropped and the hop re-rolled by a
    // predictor that knows the detour.
    Path guide{Configuration::point(2, 2)};
    guide.insert(guide.end(), detour.begin(), detour.end());
    const auto fixed = replan(broken, v, path_follower(guide), PlannerConfig{});
    REQUIRE(fixed.success);
    CHECK(fixed.replans == 1);
    CHECK(path_feasible(fixed.path, v, 0.05));
    CHECK(fixed.path.front() == broken.front());
    CHECK(fixed.path.back() == broken.back());

    PlannerConfig none;
    none.replan_depth = 0;
    const auto gave_up = replan(broken, v, path_follower(guide), none);
    CHECK_FALSE(gave_up.success);
    CHECK(gave_up.failure == PlanFailure::ReplanExhausted);

    const auto stuck = replan(broken, v, stay_put(), PlannerConfig{});
    CHECK(stuck.failure == PlanFailure::ReplanExhausted);
    CHECK(stuck.replans == 2);

    CHECK_THROWS_AS(replan({Configuration::point(2, 2)}, v, stay_put(), PlannerConfig{}), InputError);
}

TEST_CASE("plan repairs a rollout that jumps through the wall") {
    const Environment env = wall_environment();
    const InflatedView v(env);
    const Query q{Configuration::point(2, 2), Configuration::point(18, 2)};
    // First proposal lands on the far side through the wall; afterwards the
    // predictor knows the way around.
    const Path detour{q.start, Configuration::point(8.5, 16), Configuration::point(11.5, 16), q.goal};
    const Predictor p = [&](const Configuration& c, const Configuration& g) {
        if (c == q.start && g == q.goal) return Configuration::point(12, 2);
        return path_follower(detour)(c, g);
    };
    const auto r = plan(q, v, p, PlannerConfig{});
    REQUIRE(r.success);
    CHECK(r.replans >= 1);
    CHECK(path_feasible(r.path, v, 0.05));

    PlannerConfig none;
    none.replan_depth = 0;
    const auto f = plan(q, v, p, none);
    CHECK(f.failure == PlanFailure::InfeasibleAfterReplan);
}

TEST_CASE("planning with a trained network is deterministic") {
    const Environment env = wall_environment();
    DatasetConfig dc;
    dc.k_train = 30;
    dc.p_nt = 1.0;
    dc.seed = 3;
    dc.gamma_samples = 200;
    const Dataset ds = generate_dataset(env, dc);
    TrainConfig tc;
    tc.epochs = 20;
    tc.shape.hidden = {32, 32};
    const MlpModel m = train(ds, env, tc);
    const InflatedView v(env);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const Query q = uniform_query(v, rng);
        for (bool steer : {true, false}) {
            PlannerConfig cfg;
            cfg.use_steer = steer;
            const auto a = plan(q, v, model_predictor(m), cfg);
            const auto b = plan(q, v, model_predictor(m), cfg);
            CHECK(a.success == b.success);
            CHECK(a.path == b.path);
            CHECK(a.failure == b.failure);
            CHECK(a.path.front() == q.start);
            if (a.success) {
                CHECK(a.path.back() == q.goal);
                CHECK(path_feasible(a.path, v, 0.05));
                CHECK(a.cost >= config_distance(q.start, q.goal) - 1e-9);
            }
        }
    }
}

TEST_CASE("invalid endpoints are rejected") {
    const Environment env = wall_environment();
    const InflatedView v(env);
    CHECK_THROWS_AS(plan({Configuration::point(10, 5), Configuration::point(18, 2)}, v, stay_put(), PlannerConfig{}),
                    InputError);
    CHECK_THROWS_AS(plan({Configuration::pose(1, 1, 0), Configuration::pose(2, 2, 0)}, v, stay_put(), PlannerConfig{}),
                    DimensionError);
    CHECK(to_string(PlanFailure::ReplanExhausted) == "replan-exhausted");
}

}
