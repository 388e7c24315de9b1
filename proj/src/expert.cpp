#include "ntqs/expert.hpp"

#include "ntqs/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace ntqs {

std::string_view to_string(PlannerKind kind) noexcept { return kind == PlannerKind::GridAStar ? "grid_astar" : "rrt_star"; }

PlannerKind parse_planner_kind(std::string_view name) {
    if (name == "grid_astar") return PlannerKind::GridAStar;
    if (name == "rrt_star") return PlannerKind::RrtStar;
    throw ValidationError("expert.kind", fmt::format("unknown planner '{}' (expected grid_astar or rrt_star)", name));
}

void validate_expert_config(const ExpertConfig& cfg) {
    if (!(cfg.cell_size > 0.0)) throw ValidationError("expert.cell_size", "must be > 0");
    if (cfg.iterations < 1) throw ValidationError("expert.iterations", "must be > 0");
    if (!(cfg.step_size > 0.0)) throw ValidationError("expert.step_size", "must be > 0");
    if (!(cfg.goal_bias >= 0.0 && cfg.goal_bias <= 1.0)) throw ValidationError("expert.goal_bias", "must lie in [0, 1]");
    if (!(cfg.rewire_gamma > 0.0)) throw ValidationError("expert.rewire_gamma", "must be > 0");
    if (!(cfg.rewire_max > 0.0)) throw ValidationError("expert.rewire_max", "must be > 0");
    if (cfg.smoothing_rounds < 0) throw ValidationError("expert.smoothing_rounds", "must be >= 0");
    if (cfg.resolution < 0.0) throw ValidationError("expert.resolution", "must be >= 0");
}

ExpertConfig default_expert_config(const Environment& env) {
    ExpertConfig cfg;
    switch (env.kind()) {
    case ConfigKind::Point2: cfg.kind = PlannerKind::GridAStar; break;
    case ConfigKind::PoseSE2:
        cfg.kind = PlannerKind::RrtStar;
        cfg.iterations = 2000;
        cfg.step_size = 1.0;
        cfg.rewire_max = 1.5;
        break;
    case ConfigKind::Joints:
        cfg.kind = PlannerKind::RrtStar;
        cfg.iterations = 4000;
        cfg.step_size = 0.5;
        cfg.rewire_max = 0.8;
        break;
    }
    return cfg;
}

namespace {

/// Best-first search shared by the occupancy-grid and lattice planners.
/// `expand(u, emit)` calls emit(v, w) per outgoing edge. Returns node ids
/// start..goal, or empty.
template <class Expand, class Heuristic>
std::vector<int> astar(int n_nodes, int start, int goal, Expand&& expand, Heuristic&& h, double& cost_out) {
    struct Entry {
        double f;
        double g;
        int node;
    };
    // Smallest f first; among equal f, larger g first.
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.f != b.f) return a.f > b.f;
        return a.g < b.g;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
    std::vector<double> g(static_cast<std::size_t>(n_nodes), std::numeric_limits<double>::infinity());
    std::vector<int> parent(static_cast<std::size_t>(n_nodes), -1);
    std::vector<std::uint8_t> closed(static_cast<std::size_t>(n_nodes), 0);
    g[static_cast<std::size_t>(start)] = 0.0;
    open.push({h(start), 0.0, start});
    while (!open.empty()) {
        const Entry top = open.top();
        open.pop();
        const auto u = static_cast<std::size_t>(top.node);
        if (closed[u] || top.g > g[u]) continue;
        if (top.node == goal) {
            cost_out = g[u];
            std::vector<int> path;
            for (int v = goal; v != -1; v = parent[static_cast<std::size_t>(v)]) path.push_back(v);
            std::reverse(path.begin(), path.end());
            return path;
        }
        closed[u] = 1;
        expand(top.node, [&](int v, double w) {
            const auto vi = static_cast<std::size_t>(v);
            if (closed[vi]) return;
            const double ng = g[u] + w;
            if (ng < g[vi]) {
                g[vi] = ng;
                parent[vi] = top.node;
                open.push({ng + h(v), ng, v});
            }
        });
    }
    cost_out = std::numeric_limits<double>::infinity();
    return {};
}

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

} // namespace

GridPath grid_astar(const OccupancyGrid& grid, GridCell start, GridCell goal) {
    if (grid.width <= 0 || grid.height <= 0 || grid.blocked.size() != static_cast<std::size_t>(grid.width * grid.height))
        throw InputError("occupancy grid dimensions do not match its cell array");
    GridPath out;
    auto ok = [&](GridCell c) { return grid.in_bounds(c.first, c.second) && !grid.is_blocked(c.first, c.second); };
    if (!ok(start) || !ok(goal)) return out;
    const int w = grid.width;
    auto id = [w](int x, int y) { return y * w + x; };
    const double gx = goal.first;
    const double gy = goal.second;
    auto h = [&](int n) { return std::hypot(n % w - gx, n / w - gy); };
    auto expand = [&](int u, auto&& emit) {
        const int x = u % w;
        const int y = u / w;
        for (int k = 0; k < 8; ++k) {
            const int nx = x + kDx[k];
            const int ny = y + kDy[k];
            if (!grid.in_bounds(nx, ny) || grid.is_blocked(nx, ny)) continue;
            const bool diagonal = k >= 4;
            if (diagonal && (grid.is_blocked(nx, y) || grid.is_blocked(x, ny))) continue;
            emit(id(nx, ny), diagonal ? std::numbers::sqrt2 : 1.0);
        }
    };
    double cost = 0.0;
    const auto nodes = astar(w * grid.height, id(start.first, start.second), id(goal.first, goal.second), expand, h, cost);
    if (nodes.empty()) return out;
    out.found = true;
    out.cost = cost;
    for (int n : nodes) out.cells.emplace_back(n % w, n / w);
    return out;
}

Path shortcut_smooth(const Path& path, const InflatedView& view, int rounds, std::uint64_t seed, double resolution,
                     std::vector<double>* trace) {
    const double w_theta = view.env().w_theta;
    Path p = path;
    Rng rng(seed);
    for (int r = 0; r < rounds; ++r) {
        if (p.size() > 2) {
            std::size_t i = rng.index(p.size());
            std::size_t j = rng.index(p.size());
            if (i > j) std::swap(i, j);
            if (j - i >= 2) {
                double stretch = 0.0;
                for (std::size_t k = i + 1; k <= j; ++k) stretch += config_distance(p[k - 1], p[k], w_theta);
                if (config_distance(p[i], p[j], w_theta) <= stretch && steer_to(p[i], p[j], view, resolution))
                    p.erase(p.begin() + static_cast<std::ptrdiff_t>(i + 1), p.begin() + static_cast<std::ptrdiff_t>(j));
            }
        }
        if (trace) trace->push_back(path_cost(p, w_theta));
    }
    return p;
}

Path greedy_shortcut(const Path& path, const InflatedView& view, double resolution) {
    if (path.size() <= 2) return path;
    const double w_theta = view.env().w_theta;
    Path out{path.front()};
    std::size_t i = 0;
    while (i + 1 < path.size()) {
        std::size_t j = path.size() - 1;
        for (; j > i + 1; --j) {
            double stretch = 0.0;
            for (std::size_t k = i + 1; k <= j; ++k) stretch += config_distance(path[k - 1], path[k], w_theta);
            if (config_distance(path[i], path[j], w_theta) <= stretch && steer_to(path[i], path[j], view, resolution)) break;
        }
        out.push_back(path[j]);
        i = j;
    }
    return out;
}

namespace {

/// Drops lattice points in the middle of straight runs; the hops they joined
/// lie on one line, so the cost and validity are unchanged.
Path drop_collinear(const Path& p) {
    if (p.size() <= 2) return p;
    Path out{p.front()};
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const double ax = p[i][0] - out.back()[0], ay = p[i][1] - out.back()[1];
        const double bx = p[i + 1][0] - p[i][0], by = p[i + 1][1] - p[i][1];
        const bool collinear = std::abs(ax * by - ay * bx) <= 1e-12 * (std::abs(ax) + std::abs(ay)) * (std::abs(bx) + std::abs(by)) &&
                               ax * bx + ay * by > 0.0;
        if (!collinear) out.push_back(p[i]);
    }
    out.push_back(p.back());
    return out;
}

struct SolveContext {
    const Query& q;
    const InflatedView& view;
    const ExpertConfig& cfg;
    double res;
};

ExpertResult solve_lattice(const SolveContext& ctx) {
    const auto& env = ctx.view.env();
    const auto& ws = env.workspace;
    const double cell = ctx.cfg.cell_size;
    const int nx = static_cast<int>(std::floor((ws.x_max - ws.x_min) / cell + 1e-9)) + 1;
    const int ny = static_cast<int>(std::floor((ws.y_max - ws.y_min) / cell + 1e-9)) + 1;
    const int n_lattice = nx * ny;
    const int start_id = n_lattice;
    const int goal_id = n_lattice + 1;

    std::vector<std::int8_t> valid(static_cast<std::size_t>(n_lattice), -1);
    auto node_config = [&](int n) { return Configuration::point(ws.x_min + (n % nx) * cell, ws.y_min + (n / nx) * cell); };
    auto node_valid = [&](int n) {
        auto& v = valid[static_cast<std::size_t>(n)];
        if (v < 0) v = is_valid(node_config(n), ctx.view) ? 1 : 0;
        return v == 1;
    };
    auto config_of = [&](int n) {
        if (n == start_id) return ctx.q.start;
        if (n == goal_id) return ctx.q.goal;
        return node_config(n);
    };

    // Lattice nodes in the 4x4 block around a point that it can steer to.
    constexpr int kReach = 2;
    auto attach = [&](const Configuration& c) {
        std::vector<std::pair<int, double>> links;
        const int cx = static_cast<int>(std::floor((c[0] - ws.x_min) / cell));
        const int cy = static_cast<int>(std::floor((c[1] - ws.y_min) / cell));
        for (int y = cy - kReach + 1; y <= cy + kReach; ++y)
            for (int x = cx - kReach + 1; x <= cx + kReach; ++x) {
                if (x < 0 || y < 0 || x >= nx || y >= ny) continue;
                const int n = y * nx + x;
                if (!node_valid(n)) continue;
                const auto nc = node_config(n);
                if (steer_to(c, nc, ctx.view, ctx.res)) links.emplace_back(n, env.distance(c, nc));
            }
        return links;
    };
    const auto start_links = attach(ctx.q.start);
    const auto goal_links = attach(ctx.q.goal);
    std::vector<double> goal_edge(static_cast<std::size_t>(n_lattice), -1.0);
    for (const auto& [n, w] : goal_links) goal_edge[static_cast<std::size_t>(n)] = w;

    auto expand = [&](int u, auto&& emit) {
        if (u == start_id) {
            for (const auto& [n, w] : start_links) emit(n, w);
            return;
        }
        if (u == goal_id) return;
        if (goal_edge[static_cast<std::size_t>(u)] >= 0.0) emit(goal_id, goal_edge[static_cast<std::size_t>(u)]);
        const int x = u % nx;
        const int y = u / nx;
        const auto uc = node_config(u);
        for (int k = 0; k < 8; ++k) {
            const int ax = x + kDx[k];
            const int ay = y + kDy[k];
            if (ax < 0 || ay < 0 || ax >= nx || ay >= ny) continue;
            const int v = ay * nx + ax;
            if (!node_valid(v)) continue;
            const auto vc = node_config(v);
            if (steer_to(uc, vc, ctx.view, ctx.res)) emit(v, k >= 4 ? std::numbers::sqrt2 * cell : cell);
        }
    };
    auto h = [&](int n) { return env.distance(config_of(n), ctx.q.goal); };

    ExpertResult out;
    double cost = 0.0;
    const auto nodes = astar(n_lattice + 2, start_id, goal_id, expand, h, cost);
    if (nodes.empty()) {
        out.failure = "start and goal disconnected at grid resolution";
        return out;
    }
    Path raw;
    raw.reserve(nodes.size());
    for (int n : nodes) raw.push_back(config_of(n));
    out.success = true;
    out.raw_cost = path_cost(raw, env.w_theta);
    out.path = drop_collinear(raw);
    return out;
}

Configuration sample_box(const Environment& env, Rng& rng) {
    const auto& ws = env.workspace;
    std::array<double, Configuration::kMaxDim> v{};
    switch (env.kind()) {
    case ConfigKind::Point2: {
        const double x = rng.uniform(ws.x_min, ws.x_max);
        return Configuration::point(x, rng.uniform(ws.y_min, ws.y_max));
    }
    case ConfigKind::PoseSE2: {
        const double x = rng.uniform(ws.x_min, ws.x_max);
        const double y = rng.uniform(ws.y_min, ws.y_max);
        return Configuration::pose(x, y, kPi - 2.0 * kPi * rng.uniform01());
    }
    case ConfigKind::Joints:
        for (std::size_t k = 0; k < env.dim(); ++k) v[k] = kPi - 2.0 * kPi * rng.uniform01();
        return Configuration::joints(std::span<const double>(v.data(), env.dim()));
    }
    throw DimensionError("unknown configuration kind");
}

ExpertResult solve_rrt_star(const SolveContext& ctx) {
    const auto& env = ctx.view.env();
    const auto& cfg = ctx.cfg;
    const double dim = static_cast<double>(env.dim());
    const double inf = std::numeric_limits<double>::infinity();
    Rng rng(derive_seed(cfg.seed, {0x7272}));

    std::vector<Configuration> nodes{ctx.q.start};
    std::vector<int> parent{-1};
    std::vector<double> cost{0.0};
    std::vector<std::vector<int>> children(1);
    std::vector<int> goal_parents;
    std::vector<double> dist_buf;

    // Squared metric without the per-call space checks; the scans below dominate the run time.
    const std::size_t D = env.dim();
    std::array<double, Configuration::kMaxDim> weight{};
    std::array<bool, Configuration::kMaxDim> angular{};
    for (std::size_t k = 0; k < D; ++k) {
        angular[k] = ctx.q.start.is_angular(k);
        weight[k] = angular[k] && env.kind() == ConfigKind::PoseSE2 ? env.w_theta : 1.0;
    }
    auto dist2 = [&](const Configuration& a, const Configuration& b) {
        double sum = 0.0;
        for (std::size_t k = 0; k < D; ++k) {
            double d = b[k] - a[k];
            if (angular[k]) d = wrap_angle(d) * weight[k];
            sum += d * d;
        }
        return sum;
    };

    ExpertResult out;
    out.cost_trace.reserve(static_cast<std::size_t>(cfg.iterations));

    // Pushes a cost decrease down the subtree rooted at n.
    auto propagate = [&](int n, double delta) {
        std::vector<int> stack{n};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            cost[static_cast<std::size_t>(u)] -= delta;
            for (int c : children[static_cast<std::size_t>(u)]) stack.push_back(c);
        }
    };
    auto best_goal = [&]() {
        double best = inf;
        int arg = -1;
        for (int p : goal_parents) {
            const double c = cost[static_cast<std::size_t>(p)] + env.distance(nodes[static_cast<std::size_t>(p)], ctx.q.goal);
            if (c < best) {
                best = c;
                arg = p;
            }
        }
        return std::pair{best, arg};
    };

    for (int it = 0; it < cfg.iterations; ++it) {
        const Configuration target = rng.bernoulli(cfg.goal_bias) ? ctx.q.goal : sample_box(env, rng);
        const std::size_t n = nodes.size();
        dist_buf.resize(n);
        std::size_t nearest = 0;
        for (std::size_t k = 0; k < n; ++k) {
            dist_buf[k] = dist2(nodes[k], target);
            if (dist_buf[k] < dist_buf[nearest]) nearest = k;
        }
        const double d_near = std::sqrt(dist_buf[nearest]);
        if (d_near == 0.0) {
            out.cost_trace.push_back(best_goal().first);
            continue;
        }
        const Configuration x_new =
            d_near <= cfg.step_size ? target : interpolate(nodes[nearest], target, cfg.step_size / d_near);
        if (!steer_to(nodes[nearest], x_new, ctx.view, ctx.res)) {
            out.cost_trace.push_back(best_goal().first);
            continue;
        }

        const double nn = static_cast<double>(n + 1);
        const double radius = std::min(cfg.rewire_gamma * std::pow(std::log(nn) / nn, 1.0 / dim), cfg.rewire_max);
        std::vector<std::pair<double, int>> near;  // (cost through candidate, id)
        for (std::size_t k = 0; k < n; ++k) {
            const double d2 = dist2(nodes[k], x_new);
            if (d2 <= radius * radius || k == nearest) near.emplace_back(cost[k] + std::sqrt(d2), static_cast<int>(k));
        }
        std::sort(near.begin(), near.end());
        int best_parent = -1;
        double best_cost = inf;
        for (const auto& [c, k] : near) {
            if (k == static_cast<int>(nearest) || steer_to(nodes[static_cast<std::size_t>(k)], x_new, ctx.view, ctx.res)) {
                best_parent = k;
                best_cost = c;
                break;
            }
        }
        const int id = static_cast<int>(n);
        nodes.push_back(x_new);
        parent.push_back(best_parent);
        cost.push_back(best_cost);
        children.emplace_back();
        children[static_cast<std::size_t>(best_parent)].push_back(id);

        // Rewire neighbours through the new node.
        for (const auto& [c, k] : near) {
            if (k == best_parent) continue;
            const auto ku = static_cast<std::size_t>(k);
            const double through = best_cost + env.distance(x_new, nodes[ku]);
            if (through < cost[ku] && steer_to(x_new, nodes[ku], ctx.view, ctx.res)) {
                auto& siblings = children[static_cast<std::size_t>(parent[ku])];
                siblings.erase(std::find(siblings.begin(), siblings.end(), k));
                parent[ku] = id;
                children[static_cast<std::size_t>(id)].push_back(k);
                propagate(k, cost[ku] - through);
            }
        }

        if (env.distance(x_new, ctx.q.goal) <= cfg.step_size && steer_to(x_new, ctx.q.goal, ctx.view, ctx.res))
            goal_parents.push_back(id);
        out.cost_trace.push_back(best_goal().first);
    }

    const auto [best, arg] = best_goal();
    if (arg < 0) {
        out.failure = fmt::format("no path within {} iterations", cfg.iterations);
        return out;
    }
    Path path{ctx.q.goal};
    for (int v = arg; v != -1; v = parent[static_cast<std::size_t>(v)]) path.push_back(nodes[static_cast<std::size_t>(v)]);
    std::reverse(path.begin(), path.end());
    out.success = true;
    out.raw_cost = path_cost(path, env.w_theta);
    out.path = std::move(path);
    return out;
}

} // namespace

ExpertResult solve_query(const Query& q, const InflatedView& view, const ExpertConfig& cfg) {
    validate_expert_config(cfg);
    const auto& env = view.env();
    require_config_for(env, q.start);
    require_config_for(env, q.goal);
    if (!is_valid(q.start, view)) throw InputError("expert query start is not in free space: " + q.start.to_string());
    if (!is_valid(q.goal, view)) throw InputError("expert query goal is not in free space: " + q.goal.to_string());
    if (cfg.kind == PlannerKind::GridAStar && env.kind() != ConfigKind::Point2)
        throw InputError("grid_astar expert supports point robots only");

    const double res = effective_resolution(cfg.resolution, env);
    ExpertResult out;
    if (steer_to(q.start, q.goal, view, res)) {
        // The straight connection is the optimum of the length metric.
        out.success = true;
        out.path = {q.start, q.goal};
        out.cost = out.raw_cost = path_cost(out.path, env.w_theta);
        return out;
    }

    const SolveContext ctx{q, view, cfg, res};
    out = cfg.kind == PlannerKind::GridAStar ? solve_lattice(ctx) : solve_rrt_star(ctx);
    if (!out.success) return out;
    out.path = greedy_shortcut(out.path, view, res);
    out.path = shortcut_smooth(out.path, view, cfg.smoothing_rounds, derive_seed(cfg.seed, {0x5300}), res);
    out.cost = path_cost(out.path, env.w_theta);
    return out;
}

} // namespace ntqs
