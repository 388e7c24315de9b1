#pragma once

#include "ntqs/config_io.hpp"
#include "ntqs/datagen.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ntqs {

enum class QueryKind : std::uint8_t { Uniform, NonTrivial, Trivial };

std::string_view to_string(QueryKind k) noexcept;
QueryKind parse_query_kind(std::string_view name);

struct DatasetPreset {
    std::string name;
    double p_nt = 0.0;
    bool prune = false;
};

/// D0 (uniform), D1 (half non-trivial), D2 (all non-trivial), D3 (D2 + pruning).
std::vector<DatasetPreset> standard_presets();

/// A test query with the expert's answer on the evaluation view.
struct TestCase {
    Query query;
    bool expert_success = false;
    double expert_cost = 0.0;
};

/// Draws `k` test queries of `kind` on `view` (uniform, re-drawn until
/// non-trivial, or re-drawn until trivial) and solves each with the expert.
std::vector<TestCase> make_test_set(const InflatedView& view, QueryKind kind, int k, std::uint64_t seed,
                                    const ExpertConfig& expert, const SamplerConfig& sampler, double resolution,
                                    std::size_t jobs = 1);

struct MetricRow {
    std::string model;
    QueryKind kind = QueryKind::Uniform;
    bool use_steer = true;
    double success_ratio = 0.0;
    /// Mean neural/expert cost over queries solved by both; NaN when there are none.
    double cost_ratio = 0.0;
    std::size_t n_success = 0;
    std::size_t n_total = 0;
    std::size_t n_cost = 0;
    std::size_t n_expert_fail = 0;
    double mean_wall_ms = 0.0;
};

MetricRow evaluate(const std::string& model_id, const Predictor& predict, const InflatedView& view,
                   const std::vector<TestCase>& tests, QueryKind kind, const PlannerConfig& cfg, std::size_t jobs = 1);

/// Convenience form: the expert solves every query first.
MetricRow evaluate(const std::string& model_id, const Predictor& predict, const InflatedView& view,
                   const std::vector<Query>& queries, QueryKind kind, const PlannerConfig& cfg, const ExpertConfig& expert,
                   std::size_t jobs = 1);

struct ExperimentGrid {
    std::string name = "grid";
    /// Environment files, or "bundled:<name>".
    std::vector<std::string> environments;
    std::vector<DatasetPreset> presets = standard_presets();
    std::vector<QueryKind> query_kinds = {QueryKind::Uniform, QueryKind::NonTrivial};
    std::vector<bool> steer_modes = {true};
    std::vector<std::uint64_t> seeds = {1};
    int k_train = 1000;
    int k_test = 200;
    double padding = 0.0;
    double resolution = 0.0;
    /// Partial ExpertConfig objects layered over default_expert_config(env).
    json expert = json::object();
    json eval_expert = json::object();
    SamplerConfig sampler;
    TrainConfig train;
    PlannerConfig planner;
    int max_attempts_per_query = 50;
    std::uint64_t gamma_samples = 20000;
    /// Environment name -> query run without steering against every model.
    std::map<std::string, json> showcase;
    bool figures = true;
};

void validate_grid(const ExperimentGrid& g);
/// Relative environment paths resolve against `base_dir`.
ExperimentGrid parse_grid(const json& j, const std::filesystem::path& base_dir);
ExperimentGrid load_grid(const std::filesystem::path& path);
json grid_to_json(const ExperimentGrid& g);

Environment resolve_environment(const std::string& ref, const std::filesystem::path& base_dir = {});

struct ShowcaseResult {
    std::string model;
    std::uint64_t seed = 0;
    bool trivial = false;
    PlanResult result;
};

struct EnvironmentReport {
    std::string environment;
    GammaEstimate gamma;
    /// Per-seed rows, seed-major then model, kind, steer mode.
    std::vector<std::pair<std::uint64_t, MetricRow>> rows;
    std::vector<ShowcaseResult> showcase;
    /// Dataset content hashes, per seed then preset.
    std::vector<std::string> dataset_hashes;
    std::vector<std::string> model_hashes;
};

struct GridReport {
    std::vector<EnvironmentReport> environments;
    /// Files written under the output directory, relative path -> sha256.
    std::map<std::string, std::string> outputs;
};

struct CellStats {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;
};

/// Mean and sample standard deviation (0 for n < 2) over seeds, NaN values skipped.
CellStats aggregate(const EnvironmentReport& rep, const std::string& model, QueryKind kind, bool steer, bool cost);

/// Generates datasets, trains models and evaluates every cell. Artifacts are
/// cached under out_dir/cache by content hash, so an interrupted run resumes
/// and a rerun reproduces the same report bytes. Writes report.txt,
/// metrics.csv, timings.csv, figures/*.svg and manifest.json.
GridReport run_grid(const ExperimentGrid& grid, const std::filesystem::path& out_dir, std::size_t jobs = 1,
                    const std::filesystem::path& base_dir = {});

/// Aligned text tables: one block per environment and steering mode.
std::string format_report(const ExperimentGrid& grid, const GridReport& rep);
std::string format_metrics_csv(const GridReport& rep);

} // namespace ntqs
