#include "ntqs/collision.hpp"

#include "ntqs/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ntqs {

InflatedView::InflatedView(const Environment& env, double padding) : env_(&env), padding_(padding) {
    if (!(padding >= 0.0) || !std::isfinite(padding)) throw InputError(fmt::format("padding must be >= 0, got {}", padding));
    inflated_.reserve(env.obstacles.size());
    for (const auto& o : env.obstacles) inflated_.push_back({o.cx, o.cy, o.half_w + padding, o.half_h + padding});
}

std::vector<Segment> forward_kinematics(const Configuration& joints, const NLinkArm& arm) {
    if (joints.kind() != ConfigKind::Joints || joints.dim() != arm.links())
        throw DimensionError(fmt::format("arm has {} links but configuration is {}", arm.links(), joints.to_string()));
    std::vector<Segment> segments;
    segments.reserve(arm.links());
    Vec2 p = arm.base;
    double angle = 0.0;
    for (std::size_t k = 0; k < arm.links(); ++k) {
        angle += joints[k];
        const Vec2 q{p.x + arm.link_lengths[k] * std::cos(angle), p.y + arm.link_lengths[k] * std::sin(angle)};
        segments.push_back({p, q});
        p = q;
    }
    return segments;
}

bool segment_hits_obstacle(Vec2 p, Vec2 q, const Obstacle& obs, double padding) {
    const double hw = obs.half_w + padding;
    const double hh = obs.half_h + padding;
    double t0 = 0.0;
    double t1 = 1.0;
    // Clip the parameter interval against each slab.
    auto clip = [&](double start, double delta, double lo, double hi) {
        if (delta == 0.0) return start >= lo && start <= hi;
        double ta = (lo - start) / delta;
        double tb = (hi - start) / delta;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        return t0 <= t1;
    };
    return clip(p.x, q.x - p.x, obs.cx - hw, obs.cx + hw) && clip(p.y, q.y - p.y, obs.cy - hh, obs.cy + hh);
}

std::vector<Vec2> place_polygon(const RigidBody& body, const Configuration& pose) {
    const double c = std::cos(pose[2]);
    const double s = std::sin(pose[2]);
    std::vector<Vec2> out;
    out.reserve(body.vertices.size());
    for (const auto& v : body.vertices) out.push_back({pose[0] + c * v.x - s * v.y, pose[1] + s * v.x + c * v.y});
    return out;
}

bool polygon_hits_obstacle(const std::vector<Vec2>& polygon, const Obstacle& box) {
    // Box axes first; they double as a cheap bounding-box reject.
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& v : polygon) {
        min_x = std::min(min_x, v.x);
        max_x = std::max(max_x, v.x);
        min_y = std::min(min_y, v.y);
        max_y = std::max(max_y, v.y);
    }
    if (max_x < box.cx - box.half_w || min_x > box.cx + box.half_w) return false;
    if (max_y < box.cy - box.half_h || min_y > box.cy + box.half_h) return false;

    // Polygon edge normals.
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % n];
        const double nx = b.y - a.y;
        const double ny = a.x - b.x;
        double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
        for (const auto& v : polygon) {
            const double d = nx * v.x + ny * v.y;
            pmin = std::min(pmin, d);
            pmax = std::max(pmax, d);
        }
        const double centre = nx * box.cx + ny * box.cy;
        const double radius = std::abs(nx) * box.half_w + std::abs(ny) * box.half_h;
        if (pmax < centre - radius || pmin > centre + radius) return false;
    }
    return true;
}

namespace {

bool point_in_box(double x, double y, const Obstacle& o) {
    return std::abs(x - o.cx) <= o.half_w && std::abs(y - o.cy) <= o.half_h;
}

struct Validator {
    const Configuration& c;
    const InflatedView& view;

    bool operator()(const PointRobot&) const {
        if (c.kind() != ConfigKind::Point2) throw DimensionError("point robot needs a point2 configuration, got " + c.to_string());
        if (!view.env().workspace.contains(c[0], c[1])) return false;
        for (const auto& o : view.obstacles())
            if (point_in_box(c[0], c[1], o)) return false;
        return true;
    }

    bool operator()(const RigidBody& body) const {
        if (c.kind() != ConfigKind::PoseSE2) throw DimensionError("rigid body needs a pose_se2 configuration, got " + c.to_string());
        const auto poly = place_polygon(body, c);
        const auto& ws = view.env().workspace;
        for (const auto& v : poly)
            if (!ws.contains(v.x, v.y)) return false;
        for (const auto& o : view.obstacles())
            if (polygon_hits_obstacle(poly, o)) return false;
        return true;
    }

    bool operator()(const NLinkArm& arm) const {
        const auto segments = forward_kinematics(c, arm);
        const auto& ws = view.env().workspace;
        for (const auto& s : segments) {
            if (!arm.may_leave_workspace && (!ws.contains(s.a.x, s.a.y) || !ws.contains(s.b.x, s.b.y))) return false;
            for (const auto& o : view.obstacles())
                if (segment_hits_obstacle(s.a, s.b, o, 0.0)) return false;
        }
        return true;
    }
};

} // namespace

bool is_valid(const Configuration& c, const InflatedView& view) { return std::visit(Validator{c, view}, view.env().robot); }

} // namespace ntqs
