#include "ntqs/steering.hpp"

#include "ntqs/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ntqs {

double default_resolution(ConfigKind kind) noexcept { return kind == ConfigKind::Joints ? 0.02 : 0.05; }

std::size_t steer_segments(double distance, double resolution) {
    if (!(resolution > 0.0)) throw InputError(fmt::format("steering resolution must be > 0, got {}", resolution));
    std::size_t m = 1;
    while (static_cast<double>(m) * resolution < distance) {
        if (m > (std::size_t{1} << 40)) throw InputError("steering distance too large for the resolution");
        m *= 2;
    }
    return m;
}

bool steer_to(const Configuration& a, const Configuration& b, const InflatedView& view, double resolution) {
    const auto& env = view.env();
    require_config_for(env, a);
    require_config_for(env, b);
    // Canonical direction so steer_to(a, b) and steer_to(b, a) test identical samples.
    const bool swap = lex_less(b, a);
    const Configuration& lo = swap ? b : a;
    const Configuration& hi = swap ? a : b;

    if (!is_valid(lo, view)) return false;
    if (lo == hi) return true;
    if (!is_valid(hi, view)) return false;

    const std::size_t m = steer_segments(env.distance(lo, hi), resolution);
    // Coarse-to-fine order rejects early; the set of samples is still k/m, k = 1..m-1.
    for (std::size_t stride = m / 2; stride >= 1; stride /= 2) {
        for (std::size_t k = stride; k < m; k += 2 * stride) {
            const double t = static_cast<double>(k) / static_cast<double>(m);
            if (!is_valid(interpolate(lo, hi, t), view)) return false;
        }
    }
    return true;
}

double path_cost(const Path& path, double w_theta) {
    double cost = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) cost += config_distance(path[i - 1], path[i], w_theta);
    return cost;
}

bool path_feasible(const Path& path, const InflatedView& view, double resolution) {
    if (path.size() < 2) return false;
    for (std::size_t i = 1; i < path.size(); ++i)
        if (!steer_to(path[i - 1], path[i], view, resolution)) return false;
    return true;
}

} // namespace ntqs
