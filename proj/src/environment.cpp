#include "ntqs/environment.hpp"

#include "ntqs/collision.hpp"
#include "ntqs/error.hpp"
#include "ntqs/util.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>

namespace ntqs {

using nlohmann::json;

ConfigKind config_kind(const RobotModel& robot) noexcept {
    switch (robot.index()) {
    case 0: return ConfigKind::Point2;
    case 1: return ConfigKind::PoseSE2;
    default: return ConfigKind::Joints;
    }
}

std::size_t config_dim(const RobotModel& robot) noexcept {
    switch (robot.index()) {
    case 0: return 2;
    case 1: return 3;
    default: return std::get<NLinkArm>(robot).links();
    }
}

void require_config_for(const Environment& env, const Configuration& c) {
    if (c.kind() != env.kind() || c.dim() != env.dim())
        throw DimensionError(fmt::format("environment '{}' expects {}[{}], got {}", env.name, to_string(env.kind()),
                                         env.dim(), c.to_string()));
}

namespace {

bool finite(double v) { return std::isfinite(v); }

void validate_rigid_body(const RigidBody& body) {
    const auto& v = body.vertices;
    if (v.size() < 3) throw ValidationError("robot.params.vertices", "rigid body needs at least 3 vertices");
    for (const auto& p : v)
        if (!finite(p.x) || !finite(p.y)) throw ValidationError("robot.params.vertices", "non-finite vertex");
    // Counter-clockwise and convex: every turn is a strict left turn.
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        const Vec2& c = v[(i + 2) % n];
        const double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        if (!(cross > 0.0))
            throw ValidationError("robot.params.vertices", "polygon must be convex and counter-clockwise");
    }
}

void validate_arm(const NLinkArm& arm) {
    if (arm.link_lengths.empty()) throw ValidationError("robot.params.link_lengths", "arm needs at least one link");
    if (arm.link_lengths.size() > Configuration::kMaxDim)
        throw ValidationError("robot.params.link_lengths",
                              fmt::format("at most {} links supported", Configuration::kMaxDim));
    for (double l : arm.link_lengths)
        if (!(l > 0.0) || !finite(l)) throw ValidationError("robot.params.link_lengths", "link lengths must be > 0");
    if (!finite(arm.base.x) || !finite(arm.base.y)) throw ValidationError("robot.params.base", "non-finite base");
}

/// Fixed-seed search for one valid configuration.
bool has_free_configuration(const Environment& env) {
    constexpr int kAttempts = 200000;
    const InflatedView view(env, 0.0);
    Rng rng(0x5eed);
    const auto& ws = env.workspace;
    std::array<double, Configuration::kMaxDim> v{};
    for (int i = 0; i < kAttempts; ++i) {
        Configuration c;
        switch (env.kind()) {
        case ConfigKind::Point2: c = Configuration::point(rng.uniform(ws.x_min, ws.x_max), rng.uniform(ws.y_min, ws.y_max)); break;
        case ConfigKind::PoseSE2:
            c = Configuration::pose(rng.uniform(ws.x_min, ws.x_max), rng.uniform(ws.y_min, ws.y_max), rng.uniform(-kPi, kPi));
            break;
        case ConfigKind::Joints:
            for (std::size_t k = 0; k < env.dim(); ++k) v[k] = rng.uniform(-kPi, kPi);
            c = Configuration::joints(std::span<const double>(v.data(), env.dim()));
            break;
        }
        if (is_valid(c, view)) return true;
    }
    return false;
}

} // namespace

void validate_environment(const Environment& env) {
    const auto& ws = env.workspace;
    if (!finite(ws.x_min) || !finite(ws.x_max) || !(ws.x_min < ws.x_max))
        throw ValidationError("workspace.x_min", "require finite x_min < x_max");
    if (!finite(ws.y_min) || !finite(ws.y_max) || !(ws.y_min < ws.y_max))
        throw ValidationError("workspace.y_min", "require finite y_min < y_max");
    for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
        const auto& o = env.obstacles[i];
        const auto field = fmt::format("obstacles[{}]", i);
        if (!finite(o.cx) || !finite(o.cy)) throw ValidationError(field + ".cx", "non-finite centre");
        if (!(o.half_w > 0.0) || !finite(o.half_w)) throw ValidationError(field + ".half_w", "must be > 0");
        if (!(o.half_h > 0.0) || !finite(o.half_h)) throw ValidationError(field + ".half_h", "must be > 0");
        const bool intersects = o.cx - o.half_w <= ws.x_max && o.cx + o.half_w >= ws.x_min &&
                                o.cy - o.half_h <= ws.y_max && o.cy + o.half_h >= ws.y_min;
        if (!intersects) throw ValidationError(field, "rectangle does not intersect the workspace");
    }
    if (!(env.w_theta > 0.0) || !finite(env.w_theta)) throw ValidationError("w_theta", "must be > 0");
    if (const auto* body = std::get_if<RigidBody>(&env.robot)) validate_rigid_body(*body);
    if (const auto* arm = std::get_if<NLinkArm>(&env.robot)) validate_arm(*arm);
    if (!has_free_configuration(env)) throw ValidationError("obstacles", "free space appears to be empty");
}

namespace {

double get_number(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(fmt::format("missing field {}.{}", path, key));
    const auto& v = j.at(key);
    if (!v.is_number()) throw ParseError(fmt::format("field {}.{} must be a number", path, key));
    return v.get<double>();
}

Vec2 get_vec2(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(fmt::format("field {} must be [x, y]", path));
    return {j[0].get<double>(), j[1].get<double>()};
}

RobotModel parse_robot(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw ParseError("missing field robot.kind");
    const auto kind = j["kind"].get<std::string>();
    const json params = j.value("params", json::object());
    if (kind == "point") return PointRobot{};
    if (kind == "rigid_body") {
        if (!params.contains("vertices") || !params["vertices"].is_array())
            throw ParseError("missing field robot.params.vertices");
        RigidBody body;
        for (std::size_t i = 0; i < params["vertices"].size(); ++i)
            body.vertices.push_back(get_vec2(params["vertices"][i], fmt::format("robot.params.vertices[{}]", i)));
        return body;
    }
    if (kind == "n_link_arm") {
        NLinkArm arm;
        if (!params.contains("link_lengths") || !params["link_lengths"].is_array())
            throw ParseError("missing field robot.params.link_lengths");
        for (const auto& l : params["link_lengths"]) {
            if (!l.is_number()) throw ParseError("robot.params.link_lengths must hold numbers");
            arm.link_lengths.push_back(l.get<double>());
        }
        if (params.contains("n")) {
            if (!params["n"].is_number_integer()) throw ParseError("robot.params.n must be an integer");
            if (params["n"].get<long>() != static_cast<long>(arm.link_lengths.size()))
                throw ValidationError("robot.params.n", "does not match the number of link lengths");
        }
        arm.base = params.contains("base") ? get_vec2(params["base"], "robot.params.base") : Vec2{};
        arm.may_leave_workspace = params.value("may_leave_workspace", false);
        return arm;
    }
    throw ParseError("unknown robot.kind '" + kind + "' (expected point, rigid_body or n_link_arm)");
}

json robot_to_json(const RobotModel& robot) {
    return std::visit(
        [](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, PointRobot>) {
                return {{"kind", "point"}, {"params", json::object()}};
            } else if constexpr (std::is_same_v<T, RigidBody>) {
                json verts = json::array();
                for (const auto& v : r.vertices) verts.push_back({v.x, v.y});
                return {{"kind", "rigid_body"}, {"params", {{"vertices", verts}}}};
            } else {
                return {{"kind", "n_link_arm"},
                        {"params",
                         {{"n", r.links()},
                          {"link_lengths", r.link_lengths},
                          {"base", {r.base.x, r.base.y}},
                          {"may_leave_workspace", r.may_leave_workspace}}}};
            }
        },
        robot);
}

} // namespace

Environment parse_environment(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed environment file: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("environment file must hold a JSON object");
    Environment env;
    try {
        env.name = j.value("name", std::string{"unnamed"});
        if (!j.contains("workspace")) throw ParseError("missing field workspace");
        const auto& ws = j["workspace"];
        env.workspace = {get_number(ws, "x_min", "workspace"), get_number(ws, "x_max", "workspace"),
                         get_number(ws, "y_min", "workspace"), get_number(ws, "y_max", "workspace")};
        if (!j.contains("robot")) throw ParseError("missing field robot");
        env.robot = parse_robot(j["robot"]);
        if (j.contains("obstacles")) {
            if (!j["obstacles"].is_array()) throw ParseError("obstacles must be an array");
            for (std::size_t i = 0; i < j["obstacles"].size(); ++i) {
                const auto& o = j["obstacles"][i];
                const auto path = fmt::format("obstacles[{}]", i);
                env.obstacles.push_back({get_number(o, "cx", path), get_number(o, "cy", path), get_number(o, "half_w", path),
                                         get_number(o, "half_h", path)});
            }
        }
        if (j.contains("w_theta")) env.w_theta = get_number(j, "w_theta", "");
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed environment file: ") + e.what());
    }
    validate_environment(env);
    return env;
}

Environment load_environment(const std::filesystem::path& path) { return parse_environment(read_file(path)); }

std::string environment_to_json(const Environment& env) {
    json obstacles = json::array();
    for (const auto& o : env.obstacles)
        obstacles.push_back({{"cx", o.cx}, {"cy", o.cy}, {"half_w", o.half_w}, {"half_h", o.half_h}});
    json j = {{"name", env.name},
              {"workspace",
               {{"x_min", env.workspace.x_min},
                {"x_max", env.workspace.x_max},
                {"y_min", env.workspace.y_min},
                {"y_max", env.workspace.y_max}}},
              {"robot", robot_to_json(env.robot)},
              {"obstacles", obstacles},
              {"w_theta", env.w_theta}};
    return j.dump(2) + "\n";
}

void save_environment(const Environment& env, const std::filesystem::path& path) {
    write_file_atomic(path, environment_to_json(env));
}

// Bundled layouts. Obstacles are chosen so the non-triviality ratio spreads
// from light clutter to narrow passages within each task family.

Environment empty_environment() {
    Environment env;
    env.name = "empty";
    env.workspace = {0.0, 20.0, 0.0, 20.0};
    return env;
}

Environment wall_environment() {
    Environment env;
    env.name = "wall";
    env.workspace = {0.0, 20.0, 0.0, 20.0};
    env.obstacles = {{10.0, 7.5, 1.0, 7.5}};
    return env;
}

namespace {

Environment point_env(std::string name, std::vector<Obstacle> obstacles) {
    Environment env;
    env.name = std::move(name);
    env.workspace = {0.0, 20.0, 0.0, 20.0};
    env.obstacles = std::move(obstacles);
    return env;
}

RigidBody rigid_robot() { return RigidBody{{{-0.4, -0.15}, {0.4, -0.15}, {0.4, 0.15}, {-0.4, 0.15}}}; }

Environment rigid_env(std::string name, std::vector<Obstacle> obstacles) {
    Environment env;
    env.name = std::move(name);
    env.workspace = {0.0, 10.0, 0.0, 10.0};
    env.robot = rigid_robot();
    env.obstacles = std::move(obstacles);
    return env;
}

Environment arm_env(std::string name, std::vector<double> links, std::vector<Obstacle> obstacles) {
    Environment env;
    env.name = std::move(name);
    env.workspace = {-10.0, 10.0, -10.0, 10.0};
    env.robot = NLinkArm{std::move(links), {0.0, 0.0}, false};
    env.obstacles = std::move(obstacles);
    return env;
}

} // namespace

std::vector<Environment> bundled_environments() {
    std::vector<Environment> envs;
    envs.push_back(empty_environment());
    envs.push_back(wall_environment());

    envs.push_back(point_env("point_env0", {{10.0, 10.0, 3.0, 3.0}}));
    envs.push_back(point_env("point_env1", {{6.0, 6.0, 2.5, 2.5}, {14.0, 14.0, 2.5, 2.5}, {14.0, 5.0, 1.5, 2.0}}));
    envs.push_back(point_env("point_env2",
                             {{5.0, 14.0, 2.0, 3.0}, {14.0, 15.0, 3.0, 1.5}, {6.0, 5.0, 3.0, 1.5}, {15.0, 6.0, 1.5, 3.5}, {10.0, 10.0, 1.0, 1.0}}));
    envs.push_back(point_env("point_env3", {{4.0, 5.0, 1.0, 5.0},
                                            {10.0, 15.0, 1.0, 5.0},
                                            {16.0, 5.0, 1.0, 5.0},
                                            {4.0, 16.5, 2.0, 1.0},
                                            {16.0, 15.0, 2.0, 1.0},
                                            {10.0, 4.0, 2.0, 1.0}}));

    envs.push_back(rigid_env("rigid_env0", {{5.0, 3.0, 0.6, 3.0}, {5.0, 8.6, 0.6, 1.4}, {2.0, 7.0, 0.4, 0.4}}));
    envs.push_back(rigid_env("rigid_env1", {{3.0, 3.5, 0.5, 3.5}, {7.0, 6.5, 0.5, 3.5}, {5.0, 9.2, 0.8, 0.8}}));
    envs.push_back(rigid_env("rigid_env2", {{2.5, 2.5, 1.0, 1.0}, {7.5, 2.5, 1.0, 1.0}, {2.5, 7.5, 1.0, 1.0}, {7.5, 7.5, 1.0, 1.0}, {5.0, 5.0, 0.8, 0.8}}));
    envs.push_back(rigid_env("rigid_env3", {{2.5, 4.0, 0.4, 4.0}, {5.0, 6.0, 0.4, 4.0}, {7.5, 4.0, 0.4, 4.0}}));

    envs.push_back(arm_env("arm2", {3.0, 3.0}, {{4.0, 4.0, 1.0, 1.0}, {-5.0, 2.0, 1.0, 1.5}}));
    envs.push_back(arm_env("arm3", {2.5, 2.0, 1.5},
                           {{4.0, 3.5, 1.0, 1.0}, {-4.5, 2.0, 1.0, 1.5}, {2.0, -4.5, 1.5, 1.0}, {-3.5, -3.5, 0.8, 0.8}, {0.0, 5.0, 0.6, 0.5}}));
    envs.push_back(arm_env("arm4", {2.0, 2.0, 1.5, 1.5},
                           {{4.0, 3.0, 1.0, 1.0}, {-4.0, 2.0, 1.0, 1.5}, {2.0, -4.0, 1.5, 1.0}, {3.0, -1.0, 0.6, 0.6},
                            {-2.0, 4.0, 0.8, 0.6}, {-3.0, -3.0, 0.7, 0.7}}));
    // Four pillars around the base plus four smaller ones on the axes.
    envs.push_back(arm_env("arm6", {1.5, 1.5, 1.2, 1.2, 1.0, 1.0},
                           {{2.5, 2.5, 0.9, 0.9}, {-2.5, 2.5, 0.9, 0.9}, {2.5, -2.5, 0.9, 0.9}, {-2.5, -2.5, 0.9, 0.9},
                            {0.0, 4.5, 0.6, 0.6}, {4.5, 0.0, 0.6, 0.6}, {0.0, -4.5, 0.6, 0.6}, {-4.5, 0.0, 0.6, 0.6}}));
    return envs;
}

} // namespace ntqs
