#include "ntqs/svg.hpp"

#include "ntqs/config_io.hpp"
#include "ntqs/util.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace ntqs {

namespace {

constexpr double kCanvas = 600.0;
constexpr double kMargin = 20.0;

struct Frame {
    const Workspace& ws;
    double scale;

    double sx(double x) const { return kMargin + (x - ws.x_min) * scale; }
    double sy(double y) const { return kMargin + (ws.y_max - y) * scale; }
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

void rect(std::string& out, const Frame& f, const Obstacle& o, std::string_view style) {
    out += fmt::format("  <rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" {}/>\n", f.sx(o.cx - o.half_w),
                       f.sy(o.cy + o.half_h), 2.0 * o.half_w * f.scale, 2.0 * o.half_h * f.scale, style);
}

void polyline(std::string& out, const std::vector<Vec2>& pts, const Frame& f, std::string_view style, bool closed) {
    std::string coords;
    for (const auto& p : pts) coords += fmt::format("{:.3f},{:.3f} ", f.sx(p.x), f.sy(p.y));
    if (!coords.empty()) coords.pop_back();
    out += fmt::format("  <{} points=\"{}\" {}/>\n", closed ? "polygon" : "polyline", coords, style);
}

/// Workspace point that represents a configuration in scatter plots.
Vec2 anchor(const Environment& env, const Configuration& c) {
    if (const auto* arm = std::get_if<NLinkArm>(&env.robot)) return forward_kinematics(c, *arm).back().b;
    return {c[0], c[1]};
}

void draw_pose(std::string& out, const Environment& env, const Configuration& c, const Frame& f, std::string_view style) {
    if (const auto* body = std::get_if<RigidBody>(&env.robot)) {
        polyline(out, place_polygon(*body, c), f, style, true);
    } else if (const auto* arm = std::get_if<NLinkArm>(&env.robot)) {
        std::vector<Vec2> chain{arm->base};
        for (const auto& s : forward_kinematics(c, *arm)) chain.push_back(s.b);
        polyline(out, chain, f, style, false);
    }
}

} // namespace

std::string render_svg(const Environment& env, const SvgOverlays& ov) {
    const auto& ws = env.workspace;
    const double extent = std::max(ws.x_max - ws.x_min, ws.y_max - ws.y_min);
    const Frame f{ws, kCanvas / extent};
    const double width = 2 * kMargin + (ws.x_max - ws.x_min) * f.scale;
    const double height = 2 * kMargin + (ws.y_max - ws.y_min) * f.scale;

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
                       width, height, width, height);

    json meta = {{"environment", env.name}, {"padding", ov.padding}};
    json paths = json::array();
    for (const auto& p : ov.paths) {
        json wp = json::array();
        for (const auto& c : p) wp.push_back(config_to_json(c));
        paths.push_back(wp);
    }
    meta["paths"] = paths;
    meta["queries"] = ov.queries.size();
    out += "  <metadata>" + escape(meta.dump()) + "</metadata>\n";
    if (!ov.title.empty()) out += "  <title>" + escape(ov.title) + "</title>\n";

    out += fmt::format("  <rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n",
                       f.sx(ws.x_min), f.sy(ws.y_max), (ws.x_max - ws.x_min) * f.scale, (ws.y_max - ws.y_min) * f.scale);
    if (ov.padding > 0.0) {
        for (const auto& o : env.obstacles)
            rect(out, f, {o.cx, o.cy, o.half_w + ov.padding, o.half_h + ov.padding},
                 "fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4,3\"");
    }
    for (const auto& o : env.obstacles) rect(out, f, o, "fill=\"#555555\" stroke=\"none\"");

    for (const auto& q : ov.queries) {
        const Vec2 s = anchor(env, q.start);
        const Vec2 g = anchor(env, q.goal);
        out += fmt::format("  <circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"2.5\" fill=\"green\"/>\n", f.sx(s.x), f.sy(s.y));
        out += fmt::format("  <circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"2.5\" fill=\"blue\"/>\n", f.sx(g.x), f.sy(g.y));
    }

    for (const auto& p : ov.paths) {
        if (env.kind() == ConfigKind::Joints) {
            for (const auto& c : p) draw_pose(out, env, c, f, "fill=\"none\" stroke=\"magenta\" stroke-width=\"1.5\"");
            continue;
        }
        std::vector<Vec2> pts;
        for (const auto& c : p) pts.push_back({c[0], c[1]});
        polyline(out, pts, f, "fill=\"none\" stroke=\"magenta\" stroke-width=\"2\"", false);
        if (env.kind() == ConfigKind::PoseSE2)
            for (const auto& c : p) draw_pose(out, env, c, f, "fill=\"none\" stroke=\"purple\" stroke-width=\"1\"");
    }
    for (const auto& c : ov.poses) draw_pose(out, env, c, f, "fill=\"none\" stroke=\"orange\" stroke-width=\"1.5\"");

    out += "</svg>\n";
    return out;
}

void write_svg(const Environment& env, const SvgOverlays& overlays, const std::filesystem::path& path) {
    write_file_atomic(path, render_svg(env, overlays));
}

} // namespace ntqs
