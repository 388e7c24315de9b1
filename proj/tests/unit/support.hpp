#pragma once

// Independent reference implementations used as test oracles. They avoid the
// library's geometry code paths on purpose.

#include "ntqs/bench.hpp"
#include "ntqs/collision.hpp"
#include "ntqs/error.hpp"

#include <cmath>
#include <random>

namespace oracle {

/// Closed box membership.
inline bool in_box(double x, double y, const ntqs::Obstacle& o, double pad = 0.0) {
    return std::abs(x - o.cx) <= o.half_w + pad && std::abs(y - o.cy) <= o.half_h + pad;
}

/// Segment vs closed box by dense sampling at the given step.
inline bool segment_hits_dense(ntqs::Vec2 p, ntqs::Vec2 q, const ntqs::Obstacle& o, double pad, double step = 1e-3) {
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        if (in_box(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y), o, pad)) return true;
    }
    return false;
}

/// Distance from a point to the boundary of a box (0 on the boundary).
inline double box_boundary_distance(double x, double y, const ntqs::Obstacle& o) {
    const double dx = std::abs(x - o.cx) - o.half_w;
    const double dy = std::abs(y - o.cy) - o.half_h;
    if (dx > 0 || dy > 0) return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
    return std::min(-dx, -dy);
}

/// Segment vs closed box, exact: parametric clipping written independently
/// (separating axis on the segment's own normal plus the box axes).
inline bool segment_hits_exact(ntqs::Vec2 p, ntqs::Vec2 q, const ntqs::Obstacle& o) {
    const double x0 = o.cx - o.half_w, x1 = o.cx + o.half_w, y0 = o.cy - o.half_h, y1 = o.cy + o.half_h;
    if (std::max(p.x, q.x) < x0 || std::min(p.x, q.x) > x1 || std::max(p.y, q.y) < y0 || std::min(p.y, q.y) > y1)
        return false;
    const double nx = -(q.y - p.y), ny = q.x - p.x;
    const double c[4] = {nx * (x0 - p.x) + ny * (y0 - p.y), nx * (x1 - p.x) + ny * (y0 - p.y),
                         nx * (x0 - p.x) + ny * (y1 - p.y), nx * (x1 - p.x) + ny * (y1 - p.y)};
    const double lo = std::min(std::min(c[0], c[1]), std::min(c[2], c[3]));
    const double hi = std::max(std::max(c[0], c[1]), std::max(c[2], c[3]));
    return lo <= 0.0 && hi >= 0.0;
}

/// 32-bit engine with the standard distribution, so oracle streams never
/// coincide with the library's generator.
class Rand {
public:
    explicit Rand(unsigned seed) : eng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    std::mt19937& engine() { return eng_; }

private:
    std::mt19937 eng_;
};

/// Point-in-convex-polygon (CCW), inclusive.
inline bool in_convex_polygon(double x, double y, const std::vector<ntqs::Vec2>& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        if ((b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x) < 0.0) return false;
    }
    return true;
}

} // namespace oracle
