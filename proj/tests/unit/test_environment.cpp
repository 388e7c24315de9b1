#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>

using namespace ntqs;

namespace {

std::string point_env_text(const std::string& obstacles) {
    return R"({"name": "t", "workspace": {"x_min": 0, "x_max": 20, "y_min": 0, "y_max": 20},
               "robot": {"kind": "point"}, "obstacles": [)" +
           obstacles + "]}";
}

std::string error_of(const std::string& text) {
    try {
        parse_environment(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_SUITE("environment") {

TEST_CASE("empty point environment") {
    const Environment env = parse_environment(point_env_text(""));
    CHECK(env.obstacles.empty());
    CHECK(env.kind() == ConfigKind::Point2);
    CHECK(env.workspace.x_max == 20.0);
    CHECK(env.w_theta == 1.0);
}

TEST_CASE("negative half width is rejected naming the field") {
    CHECK_THROWS_AS(parse_environment(point_env_text(R"({"cx": 5, "cy": 5, "half_w": -1, "half_h": 1})")), ValidationError);
    CHECK(error_of(point_env_text(R"({"cx": 5, "cy": 5, "half_w": -1, "half_h": 1})")).find("obstacles[0].half_w") !=
          std::string::npos);
}

TEST_CASE("malformed files are parse errors") {
    CHECK_THROWS_AS(parse_environment("{ not json"), ParseError);
    CHECK_THROWS_AS(parse_environment(R"({"workspace": {"x_min": 0}})"), ParseError);
    CHECK_THROWS_AS(parse_environment(point_env_text(R"({"cx": "a", "cy": 5, "half_w": 1, "half_h": 1})")), ParseError);
    CHECK(error_of(R"({"workspace": {"x_min": 0, "x_max": 1, "y_min": 0}, "robot": {"kind": "point"}})").find("y_max") !=
          std::string::npos);
    CHECK_THROWS_AS(parse_environment(R"({"workspace": {"x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1},
                                           "robot": {"kind": "hovercraft"}})"),
                    ParseError);
}

TEST_CASE("invariant violations") {
    // inverted workspace
    CHECK_THROWS_AS(parse_environment(R"({"workspace": {"x_min": 5, "x_max": 1, "y_min": 0, "y_max": 1},
                                           "robot": {"kind": "point"}})"),
                    ValidationError);
    // obstacle entirely outside the workspace
    CHECK(error_of(point_env_text(R"({"cx": 50, "cy": 5, "half_w": 1, "half_h": 1})")).find("obstacles[0]") !=
          std::string::npos);
    // free space empty
    CHECK_THROWS_AS(parse_environment(point_env_text(R"({"cx": 10, "cy": 10, "half_w": 11, "half_h": 11})")),
                    ValidationError);
    // clockwise polygon
    CHECK_THROWS_AS(parse_environment(R"({"workspace": {"x_min": 0, "x_max": 5, "y_min": 0, "y_max": 5},
        "robot": {"kind": "rigid_body", "params": {"vertices": [[0,0],[0,1],[1,1],[1,0]]}}})"),
                    ValidationError);
    // non-convex polygon
    CHECK_THROWS_AS(parse_environment(R"({"workspace": {"x_min": 0, "x_max": 5, "y_min": 0, "y_max": 5},
        "robot": {"kind": "rigid_body", "params": {"vertices": [[0,0],[2,0],[1,0.2],[2,2],[0,2]]}}})"),
                    ValidationError);
    // two vertices
    CHECK_THROWS_AS(parse_environment(R"({"workspace": {"x_min": 0, "x_max": 5, "y_min": 0, "y_max": 5},
        "robot": {"kind": "rigid_body", "params": {"vertices": [[0,0],[2,0]]}}})"),
                    ValidationError);
    // zero link length
    CHECK(error_of(R"({"workspace": {"x_min": -5, "x_max": 5, "y_min": -5, "y_max": 5},
        "robot": {"kind": "n_link_arm", "params": {"link_lengths": [1, 0]}}})")
              .find("link_lengths") != std::string::npos);
    // n disagrees with the link list
    CHECK_THROWS_AS(parse_environment(R"({"workspace": {"x_min": -5, "x_max": 5, "y_min": -5, "y_max": 5},
        "robot": {"kind": "n_link_arm", "params": {"n": 3, "link_lengths": [1, 1]}}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_environment(point_env_text("") .replace(0, 1, R"({"w_theta": 0, )")), ValidationError);
}

TEST_CASE("comments are allowed") {
    const Environment env = parse_environment(R"({
        // a comment
        "workspace": {"x_min": 0, "x_max": 2, "y_min": 0, "y_max": 2}, /* block */
        "robot": {"kind": "point"}})");
    CHECK(env.name == "unnamed");
}

TEST_CASE("round trip of a four obstacle environment") {
    Environment env;
    env.name = "four";
    env.workspace = {0, 20, -3, 20};
    env.obstacles = {{3, 3, 1, 1}, {10.125, 7.5, 1, 7.5}, {15, 15, 0.3, 2}, {1.0 / 3.0, 18, 0.5, 0.5}};
    env.robot = RigidBody{{{-0.4, -0.15}, {0.4, -0.15}, {0.4, 0.15}, {-0.4, 0.15}}};
    env.w_theta = 0.75;
    const auto dir = std::filesystem::temp_directory_path() / "ntqs_env_test";
    save_environment(env, dir / "four.json");
    const Environment back = load_environment(dir / "four.json");
    CHECK(back == env);

    Environment arm;
    arm.name = "arm";
    arm.workspace = {-5, 5, -5, 5};
    arm.robot = NLinkArm{{1.5, 1.0, 0.7}, {0.25, -0.5}, true};
    arm.obstacles = {{3, 3, 0.5, 0.5}};
    CHECK(parse_environment(environment_to_json(arm)) == arm);
}

TEST_CASE("bundled environments are valid and distinct") {
    const auto envs = bundled_environments();
    std::set<std::string> names;
    int point = 0, rigid = 0, arm = 0;
    for (const auto& e : envs) {
        CHECK_NOTHROW(validate_environment(e));
        CHECK(names.insert(e.name).second);
        point += e.kind() == ConfigKind::Point2 && e.name.starts_with("point_env");
        rigid += e.kind() == ConfigKind::PoseSE2;
        arm += e.kind() == ConfigKind::Joints;
    }
    CHECK(point == 4);
    CHECK(rigid == 4);
    CHECK(arm == 4);
    CHECK(wall_environment().obstacles.size() == 1);
    CHECK(empty_environment().obstacles.empty());
}

TEST_CASE("configurations are checked against the robot") {
    const Environment env = wall_environment();
    CHECK_NOTHROW(require_config_for(env, Configuration::point(1, 1)));
    CHECK_THROWS_AS(require_config_for(env, Configuration::pose(1, 1, 0)), DimensionError);
    CHECK(env.distance(Configuration::point(0, 0), Configuration::point(3, 4)) == 5.0);
}

}
