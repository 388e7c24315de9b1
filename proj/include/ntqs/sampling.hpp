#pragma once

#include "ntqs/steering.hpp"
#include "ntqs/util.hpp"

#include <cstdint>

namespace ntqs {

struct Query {
    Configuration start;
    Configuration goal;
};

struct SamplerConfig {
    /// Rejection attempts for a non-trivial query before falling back.
    int n_max = 100;
    std::uint64_t seed = 1;
    /// 0 selects default_resolution() for the robot.
    double resolution = 0.0;
    /// Cap on rejection draws for a single valid configuration.
    int config_attempts = 1'000'000;
};

void validate_sampler_config(const SamplerConfig& cfg);

/// Resolution in effect for `env`: cfg.resolution, or the robot default.
double effective_resolution(double configured, const Environment& env) noexcept;

/// Draw from the configuration-space box (workspace x heading range or joint
/// box) until a valid configuration appears. Throws BudgetExhausted.
Configuration uniform_config(const InflatedView& view, Rng& rng, int max_attempts = 1'000'000);

/// Start and goal drawn independently by uniform rejection.
Query uniform_query(const InflatedView& view, Rng& rng, int max_attempts = 1'000'000);

struct SampledQuery {
    Query query;
    /// True iff steer_to(start, goal) failed; false means the attempt budget
    /// ran out and `query` is the last uniform draw.
    bool non_trivial = false;
    int attempts = 0;
};

/// Rejection sampler over the non-trivial query set.
SampledQuery non_trivial_query(const InflatedView& view, const SamplerConfig& cfg, Rng& rng);

struct GammaEstimate {
    double gamma = 0.0;
    /// 95% normal-approximation binomial half-width.
    double half_width = 0.0;
    std::uint64_t non_trivial = 0;
    std::uint64_t samples = 0;
};

/// Fraction of uniformly sampled queries whose straight connection fails.
GammaEstimate estimate_gamma_nt(const InflatedView& view, std::uint64_t n_samples, Rng& rng, double resolution);

} // namespace ntqs
