#pragma once

#include "ntqs/expert.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ntqs {

/// One supervised example: from (current, goal) predict next.
struct DataSample {
    Configuration current;
    Configuration goal;
    Configuration next;
    std::uint64_t query_id = 0;
    /// The source query's start could not steer to its goal.
    bool query_non_trivial = false;
    /// The sample was kept after the pruning test (steer_to(current, goal) failed).
    bool prune_checked = false;
};

struct DatasetConfig {
    std::string preset = "custom";
    double p_nt = 0.0;
    bool prune = false;
    int k_train = 1000;
    /// Obstacle inflation used while sampling and solving.
    double padding = 0.0;
    /// 0 selects default_resolution() for the robot; overrides the sampler
    /// and expert resolutions so every steering check agrees.
    double resolution = 0.0;
    ExpertConfig expert;
    SamplerConfig sampler;
    std::uint64_t seed = 1;
    /// Expert attempts per query slot before giving up on the slot.
    int max_attempts_per_query = 50;
    /// Retry cap across the whole dataset; exceeding it is an error.
    int max_total_failures = -1;  // -1: k_train
    std::uint64_t gamma_samples = 20000;
};

void validate_dataset_config(const DatasetConfig& cfg);

/// Per-query audit record kept in the dataset metadata.
struct QueryRecord {
    std::uint64_t id = 0;
    Query query;
    /// Drawn by the non-trivial sampler rather than uniformly.
    bool sampled_non_trivial = false;
    /// steer_to(start, goal) is false under the sampling view.
    bool non_trivial = false;
    /// Non-trivial sampler exhausted its budget and returned a trivial query.
    bool fallback = false;
    int expert_attempts = 0;
    std::uint64_t n_samples = 0;
    double expert_cost = 0.0;
    std::size_t path_length = 0;
};

struct DatasetMeta {
    DatasetConfig config;
    std::string environment;
    std::string environment_hash;
    double resolution = 0.0;
    GammaEstimate gamma;
    std::uint64_t expert_failures = 0;
    std::uint64_t fallbacks = 0;
    std::uint64_t sample_count = 0;
    std::string tool_version;
    std::vector<QueryRecord> queries;
};

struct Dataset {
    std::vector<DataSample> samples;
    DatasetMeta meta;
};

/// A solved training query and its expert path.
struct SolvedQuery {
    QueryRecord record;
    Path path;
};

/// Appends the samples of one expert path. With `prune`, sample i is skipped
/// when path[i] can steer straight to the path's final waypoint.
void include_data(std::vector<DataSample>& data, const Path& path, bool prune, const InflatedView& view, double resolution,
                  std::uint64_t query_id = 0, bool query_non_trivial = false);

/// Draws and solves cfg.k_train queries (Bernoulli(p_nt) picks the sampler per
/// slot; failed expert runs re-draw the slot). Slot j uses random streams
/// derived from (seed, j), so the result does not depend on `jobs`.
std::vector<SolvedQuery> solve_training_queries(const Environment& env, const DatasetConfig& cfg, std::size_t jobs = 1);

/// Builds the dataset from solved queries in query order.
Dataset assemble_dataset(const Environment& env, const DatasetConfig& cfg, const std::vector<SolvedQuery>& solved);

Dataset generate_dataset(const Environment& env, const DatasetConfig& cfg, std::size_t jobs = 1);

/// Number of samples violating steer_to(current, goal) = false under the
/// dataset's padding and resolution.
std::size_t count_purity_violations(const Dataset& ds, const Environment& env);

/// Binary record file at `path`, metadata at `path` + ".meta.json".
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);
std::filesystem::path dataset_meta_path(const std::filesystem::path& path);

/// Serialized forms, exposed for hashing and tests.
std::string dataset_records_bytes(const Dataset& ds);
std::string dataset_meta_json(const DatasetMeta& meta);

/// Delimited text: query_id, flags, current..., goal..., next...
std::string dataset_to_csv(const Dataset& ds);

} // namespace ntqs
