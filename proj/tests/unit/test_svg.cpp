#include "support.hpp"

#include "ntqs/svg.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace ntqs;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

json metadata(const std::string& svg) {
    const auto a = svg.find("<metadata>") + 10;
    const auto b = svg.find("</metadata>");
    return json::parse(svg.substr(a, b - a));
}

/// Circle centres of the given fill, mapped back to workspace coordinates
/// of a 20 x 20 environment drawn at 30 px per unit with a 20 px margin.
std::vector<Vec2> circles(const std::string& svg, const std::string& fill) {
    std::vector<Vec2> out;
    const std::regex re("<circle cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\" r=\"[0-9.]+\" fill=\"" + fill + "\"/>");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        out.push_back({(std::stod((*it)[1]) - 20.0) / 30.0, 20.0 - (std::stod((*it)[2]) - 20.0) / 30.0});
    return out;
}

} // namespace

TEST_SUITE("svg") {

TEST_CASE("empty environment draws only the workspace") {
    const std::string svg = render_svg(empty_environment(), {});
    CHECK(svg.starts_with("<?xml"));
    CHECK(count(svg, "<rect") == 1);
    CHECK(count(svg, "<circle") == 0);
    CHECK(count(svg, "<polyline") == 0);
    CHECK(svg.find("width=\"640\"") != std::string::npos);
    const json m = metadata(svg);
    CHECK(m["environment"] == "empty");
    CHECK(m["paths"].empty());
    CHECK(m["queries"] == 0);
}

TEST_CASE("wall environment with a path") {
    const Environment env = wall_environment();
    SvgOverlays ov;
    ov.title = "wall <detour>";
    ov.padding = 0.5;
    ov.paths = {{Configuration::point(2, 2), Configuration::point(8.5, 16), Configuration::point(11.5, 16),
                 Configuration::point(18, 2)}};
    const std::string svg = render_svg(env, ov);
    CHECK(count(svg, "fill=\"#555555\"") == 1);
    CHECK(count(svg, "stroke-dasharray") == 1);
    CHECK(count(svg, "<polyline") == 1);
    CHECK(svg.find("<title>wall &lt;detour&gt;</title>") != std::string::npos);
    // The wall occupies x in [9, 11], y in [0, 15].
    CHECK(svg.find("<rect x=\"290.000\" y=\"170.000\" width=\"60.000\" height=\"450.000\" fill=\"#555555\"") !=
          std::string::npos);
    CHECK(svg.find("points=\"80.000,560.000 275.000,140.000 365.000,140.000 560.000,560.000\"") != std::string::npos);
    const json m = metadata(svg);
    REQUIRE(m["paths"].size() == 1);
    REQUIRE(m["paths"][0].size() == 4);
    CHECK(m["paths"][0][1][0] == 8.5);
    CHECK(m["paths"][0][1][1] == 16.0);
    CHECK(m["padding"] == 0.5);
}

TEST_CASE("non-trivial query scatter straddles the inflated wall") {
    const Environment env = wall_environment();
    const double pad = 0.5;
    const InflatedView v(env, pad);
    SamplerConfig sc;
    Rng rng(13);
    SvgOverlays ov;
    ov.padding = pad;
    for (int i = 0; i < 300; ++i) ov.queries.push_back(non_trivial_query(v, sc, rng).query);
    const std::string svg = render_svg(env, ov);
    const auto starts = circles(svg, "green"), goals = circles(svg, "blue");
    REQUIRE(starts.size() == 300);
    REQUIRE(goals.size() == 300);
    const Obstacle grown{10, 7.5, 1 + pad, 7.5 + pad};
    int crossing = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        CHECK(starts[i].x == doctest::Approx(ov.queries[i].start[0]).epsilon(1e-3));
        crossing += oracle::segment_hits_exact(starts[i], goals[i], grown);
    }
    CHECK(crossing >= 285);
    CHECK(metadata(svg)["queries"] == 300);
}

TEST_CASE("rigid body and arm overlays") {
    Environment rigid, arm;
    for (auto& e : bundled_environments()) {
        if (e.name == "rigid_env0") rigid = e;
        if (e.name == "arm2") arm = e;
    }
    SvgOverlays ov;
    ov.paths = {{Configuration::pose(1, 1, 0), Configuration::pose(2, 8, 1.0)}};
    ov.poses = {Configuration::pose(8, 8, 0.5)};
    const std::string r = render_svg(rigid, ov);
    CHECK(count(r, "<polygon") == 3);
    CHECK(count(r, "stroke=\"orange\"") == 1);

    const double q0[2] = {0, 0}, q1[2] = {kPi / 2, 0};
    SvgOverlays ao;
    ao.paths = {{Configuration::joints(q0), Configuration::joints(q1)}};
    ao.queries = {{Configuration::joints(q0), Configuration::joints(q1)}};
    const std::string a = render_svg(arm, ao);
    CHECK(count(a, "<polyline") == 2);
    // End effector of the straight arm sits at (6, 0): x = 20 + 16 * 30.
    CHECK(a.find("<circle cx=\"500.000\" cy=\"320.000\"") != std::string::npos);
}

TEST_CASE("rendering is deterministic") {
    const Environment env = bundled_environments()[4];
    SvgOverlays ov;
    ov.paths = {{Configuration::point(1, 1), Configuration::point(19, 1)}};
    CHECK(render_svg(env, ov) == render_svg(env, ov));
    const auto dir = std::filesystem::temp_directory_path() / "ntqs_svg_test";
    std::filesystem::create_directories(dir);
    write_svg(env, ov, dir / "a.svg");
    std::ifstream in(dir / "a.svg");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == render_svg(env, ov));
}

}
