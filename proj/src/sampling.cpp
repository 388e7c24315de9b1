#include "ntqs/sampling.hpp"

#include "ntqs/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ntqs {

void validate_sampler_config(const SamplerConfig& cfg) {
    if (cfg.n_max < 1) throw ValidationError("sampler.n_max", "must be >= 1");
    if (cfg.resolution < 0.0) throw ValidationError("sampler.resolution", "must be >= 0 (0 = robot default)");
    if (cfg.config_attempts < 1) throw ValidationError("sampler.config_attempts", "must be >= 1");
}

double effective_resolution(double configured, const Environment& env) noexcept {
    return configured > 0.0 ? configured : default_resolution(env.kind());
}

Configuration uniform_config(const InflatedView& view, Rng& rng, int max_attempts) {
    const auto& env = view.env();
    const auto& ws = env.workspace;
    std::array<double, Configuration::kMaxDim> v{};
    for (int i = 0; i < max_attempts; ++i) {
        Configuration c;
        switch (env.kind()) {
        case ConfigKind::Point2: {
            const double x = rng.uniform(ws.x_min, ws.x_max);
            const double y = rng.uniform(ws.y_min, ws.y_max);
            c = Configuration::point(x, y);
            break;
        }
        case ConfigKind::PoseSE2: {
            const double x = rng.uniform(ws.x_min, ws.x_max);
            const double y = rng.uniform(ws.y_min, ws.y_max);
            // pi - 2 pi u maps [0, 1) onto (-pi, pi].
            const double th = kPi - 2.0 * kPi * rng.uniform01();
            c = Configuration::pose(x, y, th);
            break;
        }
        case ConfigKind::Joints:
            for (std::size_t k = 0; k < env.dim(); ++k) v[k] = kPi - 2.0 * kPi * rng.uniform01();
            c = Configuration::joints(std::span<const double>(v.data(), env.dim()));
            break;
        }
        if (is_valid(c, view)) return c;
    }
    throw BudgetExhausted(fmt::format("no valid configuration in '{}' after {} draws", env.name, max_attempts));
}

Query uniform_query(const InflatedView& view, Rng& rng, int max_attempts) {
    Query q;
    q.start = uniform_config(view, rng, max_attempts);
    q.goal = uniform_config(view, rng, max_attempts);
    return q;
}

SampledQuery non_trivial_query(const InflatedView& view, const SamplerConfig& cfg, Rng& rng) {
    validate_sampler_config(cfg);
    const double res = effective_resolution(cfg.resolution, view.env());
    SampledQuery out;
    for (int i = 1; i <= cfg.n_max; ++i) {
        out.query = uniform_query(view, rng, cfg.config_attempts);
        out.attempts = i;
        if (!steer_to(out.query.start, out.query.goal, view, res)) {
            out.non_trivial = true;
            return out;
        }
    }
    // Budget exhausted: hand back the last uniform draw, flagged trivial.
    out.non_trivial = false;
    return out;
}

GammaEstimate estimate_gamma_nt(const InflatedView& view, std::uint64_t n_samples, Rng& rng, double resolution) {
    if (n_samples < 1) throw InputError("estimate_gamma_nt needs n_samples >= 1");
    const double res = effective_resolution(resolution, view.env());
    GammaEstimate est;
    est.samples = n_samples;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const Query q = uniform_query(view, rng);
        if (!steer_to(q.start, q.goal, view, res)) ++est.non_trivial;
    }
    const double n = static_cast<double>(n_samples);
    est.gamma = static_cast<double>(est.non_trivial) / n;
    est.half_width = 1.96 * std::sqrt(est.gamma * (1.0 - est.gamma) / n);
    return est;
}

} // namespace ntqs
