#include "ntqs/bench.hpp"

#include "ntqs/error.hpp"
#include "ntqs/svg.hpp"
#include "ntqs/util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>

namespace ntqs {

namespace fs = std::filesystem;

std::string_view to_string(QueryKind k) noexcept {
    switch (k) {
    case QueryKind::Uniform: return "uniform";
    case QueryKind::NonTrivial: return "non_trivial";
    case QueryKind::Trivial: return "trivial";
    }
    return "unknown";
}

QueryKind parse_query_kind(std::string_view name) {
    if (name == "uniform") return QueryKind::Uniform;
    if (name == "non_trivial") return QueryKind::NonTrivial;
    if (name == "trivial") return QueryKind::Trivial;
    throw ValidationError("query_kinds", fmt::format("unknown query kind '{}'", name));
}

std::vector<DatasetPreset> standard_presets() {
    return {{"D0", 0.0, false}, {"D1", 0.5, false}, {"D2", 1.0, false}, {"D3", 1.0, true}};
}

namespace {

constexpr int kRedrawCap = 100'000;

Query draw_test_query(const InflatedView& view, QueryKind kind, const SamplerConfig& sampler, double res, Rng& rng) {
    if (kind == QueryKind::Uniform) return uniform_query(view, rng, sampler.config_attempts);
    for (int i = 0; i < kRedrawCap; ++i) {
        if (kind == QueryKind::NonTrivial) {
            const SampledQuery s = non_trivial_query(view, sampler, rng);
            if (s.non_trivial) return s.query;
        } else {
            const Query q = uniform_query(view, rng, sampler.config_attempts);
            if (steer_to(q.start, q.goal, view, res)) return q;
        }
    }
    throw BudgetExhausted(fmt::format("no {} test query after {} draws", to_string(kind), kRedrawCap));
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace

std::vector<TestCase> make_test_set(const InflatedView& view, QueryKind kind, int k, std::uint64_t seed,
                                    const ExpertConfig& expert, const SamplerConfig& sampler, double resolution,
                                    std::size_t jobs) {
    if (k < 1) throw ValidationError("k_test", "must be >= 1");
    SamplerConfig sc = sampler;
    sc.resolution = resolution;
    ExpertConfig ec = expert;
    ec.resolution = resolution;
    std::vector<TestCase> out(static_cast<std::size_t>(k));
    parallel_for(out.size(), jobs, [&](std::size_t j) {
        Rng rng(derive_seed(seed, {0x7e57, static_cast<std::uint64_t>(kind), j}));
        TestCase& tc = out[j];
        tc.query = draw_test_query(view, kind, sc, resolution, rng);
        ExpertConfig local = ec;
        local.seed = derive_seed(ec.seed, {seed, j});
        const ExpertResult r = solve_query(tc.query, view, local);
        tc.expert_success = r.success;
        tc.expert_cost = r.success ? r.cost : 0.0;
    });
    return out;
}

MetricRow evaluate(const std::string& model_id, const Predictor& predict, const InflatedView& view,
                   const std::vector<TestCase>& tests, QueryKind kind, const PlannerConfig& cfg, std::size_t jobs) {
    validate_planner_config(cfg);
    std::vector<PlanResult> results(tests.size());
    parallel_for(tests.size(), jobs, [&](std::size_t i) { results[i] = plan(tests[i].query, view, predict, cfg); });

    MetricRow row;
    row.model = model_id;
    row.kind = kind;
    row.use_steer = cfg.use_steer;
    row.n_total = tests.size();
    std::vector<double> ratios;
    std::vector<double> walls;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const PlanResult& r = results[i];
        walls.push_back(r.wall_ms);
        if (r.success) ++row.n_success;
        if (!tests[i].expert_success) {
            ++row.n_expert_fail;
            continue;
        }
        if (!r.success) continue;
        // Coincident start and goal: both costs are zero and the query is trivially matched.
        ratios.push_back(tests[i].expert_cost > 0.0 ? r.cost / tests[i].expert_cost : 1.0);
    }
    row.n_cost = ratios.size();
    row.success_ratio = row.n_total ? static_cast<double>(row.n_success) / static_cast<double>(row.n_total) : 0.0;
    row.cost_ratio = ratios.empty() ? std::numeric_limits<double>::quiet_NaN() : mean_of(ratios);
    row.mean_wall_ms = mean_of(walls);
    return row;
}

MetricRow evaluate(const std::string& model_id, const Predictor& predict, const InflatedView& view,
                   const std::vector<Query>& queries, QueryKind kind, const PlannerConfig& cfg, const ExpertConfig& expert,
                   std::size_t jobs) {
    std::vector<TestCase> tests(queries.size());
    parallel_for(queries.size(), jobs, [&](std::size_t i) {
        tests[i].query = queries[i];
        ExpertConfig local = expert;
        local.seed = derive_seed(expert.seed, {i});
        const ExpertResult r = solve_query(queries[i], view, local);
        tests[i].expert_success = r.success;
        tests[i].expert_cost = r.cost;
    });
    return evaluate(model_id, predict, view, tests, kind, cfg, jobs);
}

// ---------------------------------------------------------------------------
// grid configuration

void validate_grid(const ExperimentGrid& g) {
    if (g.environments.empty()) throw ValidationError("environments", "at least one environment is required");
    if (g.presets.empty()) throw ValidationError("presets", "at least one dataset preset is required");
    for (const auto& p : g.presets) {
        if (!(p.p_nt >= 0.0 && p.p_nt <= 1.0)) throw ValidationError("presets.p_nt", "must lie in [0, 1]");
        if (p.name.empty()) throw ValidationError("presets.name", "must not be empty");
        if (std::count_if(g.presets.begin(), g.presets.end(), [&](const DatasetPreset& q) { return q.name == p.name; }) > 1)
            throw ValidationError("presets.name", "duplicate preset '" + p.name + "'");
    }
    if (g.query_kinds.empty()) throw ValidationError("query_kinds", "at least one query kind is required");
    if (g.steer_modes.empty()) throw ValidationError("steer_modes", "at least one steering mode is required");
    if (g.seeds.empty()) throw ValidationError("seeds", "at least one seed is required");
    if (g.k_train < 1) throw ValidationError("k_train", "must be >= 1");
    if (g.k_test < 1) throw ValidationError("k_test", "must be >= 1");
    if (g.padding < 0.0) throw ValidationError("padding", "must be >= 0");
    if (g.resolution < 0.0) throw ValidationError("resolution", "must be >= 0");
    if (g.max_attempts_per_query < 1) throw ValidationError("max_attempts_per_query", "must be >= 1");
    if (g.gamma_samples < 1) throw ValidationError("gamma_samples", "must be >= 1");
    validate_sampler_config(g.sampler);
    validate_train_config(g.train);
    PlannerConfig p = g.planner;
    p.use_steer = false;
    validate_planner_config(p);
}

ExperimentGrid parse_grid(const json& j, const fs::path& base_dir) {
    reject_unknown_keys(j,
                        {"name", "environments", "presets", "query_kinds", "steer_modes", "seeds", "k_train", "k_test",
                         "padding", "resolution", "expert", "eval_expert", "sampler", "train", "planner",
                         "max_attempts_per_query", "gamma_samples", "showcase", "figures"},
                        "grid");
    ExperimentGrid g;
    try {
        g.name = j.value("name", g.name);
        for (const auto& e : j.at("environments")) {
            std::string ref = e.get<std::string>();
            if (!ref.starts_with("bundled:") && fs::path(ref).is_relative() && !base_dir.empty())
                ref = (base_dir / ref).lexically_normal().string();
            g.environments.push_back(std::move(ref));
        }
        if (j.contains("presets")) {
            g.presets.clear();
            for (const auto& p : j.at("presets")) {
                reject_unknown_keys(p, {"name", "p_nt", "prune"}, "presets");
                g.presets.push_back({p.at("name").get<std::string>(), p.at("p_nt").get<double>(), p.value("prune", false)});
            }
        }
        if (j.contains("query_kinds")) {
            g.query_kinds.clear();
            for (const auto& k : j.at("query_kinds")) g.query_kinds.push_back(parse_query_kind(k.get<std::string>()));
        }
        if (j.contains("steer_modes")) g.steer_modes = j.at("steer_modes").get<std::vector<bool>>();
        if (j.contains("seeds")) g.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        g.k_train = j.value("k_train", g.k_train);
        g.k_test = j.value("k_test", g.k_test);
        g.padding = j.value("padding", g.padding);
        g.resolution = j.value("resolution", g.resolution);
        if (j.contains("expert")) g.expert = j.at("expert");
        if (j.contains("eval_expert")) g.eval_expert = j.at("eval_expert");
        if (j.contains("sampler")) from_json(j.at("sampler"), g.sampler);
        if (j.contains("train")) from_json(j.at("train"), g.train);
        if (j.contains("planner")) from_json(j.at("planner"), g.planner);
        g.max_attempts_per_query = j.value("max_attempts_per_query", g.max_attempts_per_query);
        g.gamma_samples = j.value("gamma_samples", g.gamma_samples);
        if (j.contains("showcase"))
            for (const auto& [name, q] : j.at("showcase").items()) g.showcase[name] = q;
        g.figures = j.value("figures", g.figures);
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("grid configuration: {}", e.what()));
    }
    // Catch bad expert overrides before any work starts.
    ExpertConfig probe;
    from_json(g.expert, probe);
    from_json(g.eval_expert, probe);
    validate_grid(g);
    return g;
}

ExperimentGrid load_grid(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return parse_grid(j, path.parent_path());
}

json grid_to_json(const ExperimentGrid& g) {
    json presets = json::array();
    for (const auto& p : g.presets) presets.push_back({{"name", p.name}, {"p_nt", p.p_nt}, {"prune", p.prune}});
    json kinds = json::array();
    for (auto k : g.query_kinds) kinds.push_back(std::string(to_string(k)));
    json showcase = json::object();
    for (const auto& [name, q] : g.showcase) showcase[name] = q;
    return {{"name", g.name},
            {"environments", g.environments},
            {"presets", presets},
            {"query_kinds", kinds},
            {"steer_modes", g.steer_modes},
            {"seeds", g.seeds},
            {"k_train", g.k_train},
            {"k_test", g.k_test},
            {"padding", g.padding},
            {"resolution", g.resolution},
            {"expert", g.expert},
            {"eval_expert", g.eval_expert},
            {"sampler", g.sampler},
            {"train", g.train},
            {"planner", g.planner},
            {"max_attempts_per_query", g.max_attempts_per_query},
            {"gamma_samples", g.gamma_samples},
            {"showcase", showcase},
            {"figures", g.figures}};
}

Environment resolve_environment(const std::string& ref, const fs::path& base_dir) {
    if (ref.starts_with("bundled:")) {
        const std::string name = ref.substr(8);
        if (name == "wall") return wall_environment();
        if (name == "empty") return empty_environment();
        for (auto& e : bundled_environments())
            if (e.name == name) return e;
        throw InputError(fmt::format("no bundled environment named '{}'", name));
    }
    fs::path p(ref);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return load_environment(p);
}

CellStats aggregate(const EnvironmentReport& rep, const std::string& model, QueryKind kind, bool steer, bool cost) {
    std::vector<double> v;
    for (const auto& [seed, row] : rep.rows) {
        if (row.model != model || row.kind != kind || row.use_steer != steer) continue;
        const double x = cost ? row.cost_ratio : row.success_ratio;
        if (!std::isnan(x)) v.push_back(x);
    }
    CellStats s;
    s.n = v.size();
    s.mean = mean_of(v);
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

// ---------------------------------------------------------------------------
// grid execution

namespace {

/// PNet<k> for a preset named D<k>, otherwise PNet_<preset>.
std::string model_name(const DatasetPreset& p) {
    if (p.name.size() > 1 && p.name[0] == 'D' && std::all_of(p.name.begin() + 1, p.name.end(), ::isdigit))
        return "PNet" + p.name.substr(1);
    return "PNet_" + p.name;
}

json test_set_to_json(const std::vector<TestCase>& tests) {
    json a = json::array();
    for (const auto& t : tests)
        a.push_back({{"start", config_to_json(t.query.start)},
                     {"goal", config_to_json(t.query.goal)},
                     {"expert_success", t.expert_success},
                     {"expert_cost", t.expert_cost}});
    return a;
}

std::vector<TestCase> test_set_from_json(const json& a, ConfigKind kind) {
    std::vector<TestCase> out;
    for (const auto& t : a)
        out.push_back({{config_from_json(t.at("start"), kind), config_from_json(t.at("goal"), kind)},
                       t.at("expert_success").get<bool>(),
                       t.at("expert_cost").get<double>()});
    return out;
}

std::string hash_json(const json& j) { return sha256_hex(j.dump()); }

/// Expert paths reconstructed from an unpruned dataset, in query order.
std::vector<Path> dataset_paths(const Dataset& ds, std::size_t limit) {
    std::vector<Path> out;
    std::uint64_t current = std::numeric_limits<std::uint64_t>::max();
    for (const auto& s : ds.samples) {
        if (s.query_id != current) {
            if (out.size() == limit) break;
            out.push_back({s.current});
            current = s.query_id;
        }
        out.back().push_back(s.next);
    }
    return out;
}

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt_num(double x) { return std::isnan(x) ? std::string("nan") : fmt::format("{:.6f}", x); }

} // namespace

GridReport run_grid(const ExperimentGrid& grid, const fs::path& out_dir, std::size_t jobs, const fs::path& base_dir) {
    validate_grid(grid);
    const fs::path cache = out_dir / "cache";
    fs::create_directories(cache / "datasets");
    fs::create_directories(cache / "models");
    fs::create_directories(cache / "tests");

    GridReport report;
    std::string timings = "environment,stage,seed,item,seconds\n";
    std::mutex timings_mu;
    auto note_time = [&](const std::string& env, std::string_view stage, std::uint64_t seed, const std::string& item,
                         double secs) {
        std::lock_guard lock(timings_mu);
        timings += fmt::format("{},{},{},{},{:.3f}\n", env, stage, seed, item, secs);
    };
    json manifest_envs = json::array();

    for (const auto& ref : grid.environments) {
        const Environment env = resolve_environment(ref, base_dir);
        validate_environment(env);
        const std::string env_json = environment_to_json(env);
        const InflatedView padded(env, grid.padding);
        const InflatedView eval_view(env, 0.0);
        const double res = effective_resolution(grid.resolution, env);

        ExpertConfig expert = default_expert_config(env);
        from_json(grid.expert, expert);
        ExpertConfig eval_expert = default_expert_config(env);
        from_json(grid.eval_expert, eval_expert);

        EnvironmentReport er;
        er.environment = env.name;
        {
            Rng rng(derive_seed(grid.seeds.front(), {0x6a3}));
            er.gamma = estimate_gamma_nt(eval_view, grid.gamma_samples, rng, res);
        }

        const std::size_t n_models = grid.presets.size();
        std::vector<std::vector<Dataset>> datasets(grid.seeds.size());
        std::vector<std::vector<std::string>> dataset_keys(grid.seeds.size());

        // Datasets: presets with equal (p_nt, seed) share their solved queries.
        for (std::size_t si = 0; si < grid.seeds.size(); ++si) {
            const std::uint64_t seed = grid.seeds[si];
            std::map<std::string, std::vector<SolvedQuery>> solved_memo;
            for (std::size_t pi = 0; pi < n_models; ++pi) {
                const auto& preset = grid.presets[pi];
                DatasetConfig dc;
                dc.preset = preset.name;
                dc.p_nt = preset.p_nt;
                dc.prune = preset.prune;
                dc.k_train = grid.k_train;
                dc.padding = grid.padding;
                dc.resolution = grid.resolution;
                dc.expert = expert;
                dc.sampler = grid.sampler;
                dc.seed = seed;
                dc.max_attempts_per_query = grid.max_attempts_per_query;
                dc.gamma_samples = grid.gamma_samples;
                const std::string key = hash_json({{"tool", kToolVersion}, {"environment", env_json}, {"dataset", dc}});
                const fs::path file = cache / "datasets" / (key + ".ntqs");
                Clock clock;
                if (fs::exists(file) && fs::exists(dataset_meta_path(file))) {
                    datasets[si].push_back(load_dataset(file));
                } else {
                    DatasetConfig solve_cfg = dc;
                    solve_cfg.preset = "";
                    solve_cfg.prune = false;
                    const std::string solve_key = hash_json({{"dataset", solve_cfg}});
                    auto it = solved_memo.find(solve_key);
                    if (it == solved_memo.end())
                        it = solved_memo.emplace(solve_key, solve_training_queries(env, dc, jobs)).first;
                    Dataset ds = assemble_dataset(env, dc, it->second);
                    save_dataset(ds, file);
                    datasets[si].push_back(std::move(ds));
                }
                note_time(env.name, "dataset", seed, preset.name, clock.seconds());
                dataset_keys[si].push_back(key);
                er.dataset_hashes.push_back(sha256_file(file));
            }
        }

        // Models: independent jobs over the cached datasets.
        std::vector<MlpModel> models(grid.seeds.size() * n_models);
        std::vector<std::string> model_files(models.size());
        parallel_for(models.size(), jobs, [&](std::size_t idx) {
            const std::size_t si = idx / n_models;
            const std::size_t pi = idx % n_models;
            TrainConfig tc = grid.train;
            tc.seed = derive_seed(grid.train.seed, {grid.seeds[si]});
            const std::string key =
                hash_json({{"tool", kToolVersion}, {"dataset", dataset_keys[si][pi]}, {"train", tc}});
            const fs::path file = cache / "models" / (key + ".model");
            Clock clock;
            if (fs::exists(file)) {
                models[idx] = load_model(file);
            } else {
                TrainReport tr;
                models[idx] = train(datasets[si][pi], env, tc, &tr);
                save_model(models[idx], file);
                json log = {{"train_loss", tr.train_loss},
                            {"val_loss", tr.val_loss},
                            {"train_samples", tr.train_samples},
                            {"val_samples", tr.val_samples}};
                write_file_atomic(cache / "models" / (key + ".train.json"), log.dump(1));
            }
            model_files[idx] = file.string();
            note_time(env.name, "train", grid.seeds[si], model_name(grid.presets[pi]), clock.seconds());
        });
        for (const auto& f : model_files) er.model_hashes.push_back(sha256_file(f));

        // Evaluation.
        for (std::size_t si = 0; si < grid.seeds.size(); ++si) {
            const std::uint64_t seed = grid.seeds[si];
            for (QueryKind kind : grid.query_kinds) {
                const std::string key = hash_json({{"tool", kToolVersion},
                                                   {"environment", env_json},
                                                   {"kind", to_string(kind)},
                                                   {"k_test", grid.k_test},
                                                   {"seed", seed},
                                                   {"expert", eval_expert},
                                                   {"sampler", grid.sampler},
                                                   {"resolution", res}});
                const fs::path file = cache / "tests" / (key + ".json");
                Clock clock;
                std::vector<TestCase> tests;
                if (fs::exists(file)) {
                    tests = test_set_from_json(json::parse(read_file(file)), env.kind());
                } else {
                    tests = make_test_set(eval_view, kind, grid.k_test, seed, eval_expert, grid.sampler, res, jobs);
                    write_file_atomic(file, test_set_to_json(tests).dump(1));
                }
                note_time(env.name, "test_set", seed, std::string(to_string(kind)), clock.seconds());

                for (std::size_t pi = 0; pi < n_models; ++pi) {
                    const Predictor predict = model_predictor(models[si * n_models + pi]);
                    for (bool steer : grid.steer_modes) {
                        PlannerConfig pc = grid.planner;
                        pc.use_steer = steer;
                        pc.resolution = grid.resolution;
                        Clock eval_clock;
                        MetricRow row = evaluate(model_name(grid.presets[pi]), predict, eval_view, tests, kind, pc, jobs);
                        note_time(env.name, fmt::format("eval_{}_{}", to_string(kind), steer ? "steer" : "nosteer"),
                                  seed, model_name(grid.presets[pi]), eval_clock.seconds());
                        er.rows.emplace_back(seed, std::move(row));
                    }
                }
            }

            if (auto it = grid.showcase.find(env.name); it != grid.showcase.end()) {
                const Query q{config_from_json(it->second.at("start"), env.kind()),
                              config_from_json(it->second.at("goal"), env.kind())};
                PlannerConfig pc = grid.planner;
                pc.use_steer = false;
                pc.resolution = grid.resolution;
                for (std::size_t pi = 0; pi < n_models; ++pi) {
                    ShowcaseResult sr;
                    sr.model = model_name(grid.presets[pi]);
                    sr.seed = seed;
                    sr.trivial = steer_to(q.start, q.goal, eval_view, res);
                    sr.result = plan(q, eval_view, model_predictor(models[si * n_models + pi]), pc);
                    er.showcase.push_back(std::move(sr));
                }
            }
        }

        if (grid.figures) {
            const fs::path fig = out_dir / "figures";
            SvgOverlays base;
            base.title = env.name;
            base.padding = grid.padding;
            write_svg(env, base, fig / (env.name + "_env.svg"));
            // Expert paths come from the most non-trivial unpruned dataset.
            std::size_t path_preset = 0;
            for (std::size_t pi = 0; pi < n_models; ++pi)
                if (!grid.presets[pi].prune && grid.presets[pi].p_nt >= grid.presets[path_preset].p_nt) path_preset = pi;
            for (std::size_t pi = 0; pi < n_models; ++pi) {
                const Dataset& ds = datasets[0][pi];
                SvgOverlays ov = base;
                ov.title = fmt::format("{} {} training queries", env.name, grid.presets[pi].name);
                for (std::size_t i = 0; i < ds.meta.queries.size() && i < 300; ++i) ov.queries.push_back(ds.meta.queries[i].query);
                write_svg(env, ov, fig / fmt::format("{}_queries_{}.svg", env.name, grid.presets[pi].name));
                if (pi == path_preset) {
                    SvgOverlays paths = base;
                    paths.title = fmt::format("{} expert paths", env.name);
                    paths.paths = dataset_paths(ds, 5);
                    write_svg(env, paths, fig / fmt::format("{}_expert_paths.svg", env.name));
                }
            }
            if (!er.showcase.empty()) {
                SvgOverlays ov = base;
                ov.title = fmt::format("{} showcase query without steering", env.name);
                for (const auto& sr : er.showcase)
                    if (sr.seed == grid.seeds.front()) ov.paths.push_back(sr.result.path);
                write_svg(env, ov, fig / fmt::format("{}_showcase.svg", env.name));
            }
        }

        manifest_envs.push_back({{"environment", env.name},
                                 {"environment_sha256", sha256_hex(env_json)},
                                 {"datasets", er.dataset_hashes},
                                 {"models", er.model_hashes}});
        report.environments.push_back(std::move(er));
    }

    write_file_atomic(out_dir / "report.txt", format_report(grid, report));
    write_file_atomic(out_dir / "metrics.csv", format_metrics_csv(report));
    write_file_atomic(out_dir / "timings.csv", timings);

    for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), out_dir).generic_string();
        if (rel == "manifest.json" || rel == "timings.csv" || rel.starts_with("cache/")) continue;
        report.outputs[rel] = sha256_file(entry.path());
    }
    json manifest = {{"subcommand", "grid"},
                     {"tool_version", kToolVersion},
                     {"config", grid_to_json(grid)},
                     {"environments", manifest_envs},
                     {"outputs", report.outputs},
                     {"timings", "timings.csv (wall-clock, not reproducible)"}};
    write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return report;
}

// ---------------------------------------------------------------------------
// report formatting

std::string format_report(const ExperimentGrid& grid, const GridReport& rep) {
    std::string out;
    out += fmt::format("Grid {}: K_train = {}, K_test = {}, padding = {}, seeds = {}\n", grid.name, grid.k_train,
                       grid.k_test, grid.padding, grid.seeds.size());
    out += "Cells show mean ± sample std over seeds (the std column is an addition; single runs have none).\n";
    out += "Cost ratio averages neural/expert cost over queries solved by both.\n\n";

    auto cell = [](const CellStats& s) {
        if (s.n == 0) return fmt::format("{:>15}", "-");
        return fmt::format("{:>6.3f} ± {:<6.3f}", s.mean, s.stddev);
    };

    for (const auto& er : rep.environments) {
        out += fmt::format("Environment {}, gamma_nt = {:.3f} ± {:.3f} ({} uniform queries)\n", er.environment,
                           er.gamma.gamma, er.gamma.half_width, er.gamma.samples);
        for (bool steer : grid.steer_modes) {
            out += fmt::format("steering: {}\n", steer ? "on" : fmt::format("off (delta = {})", grid.planner.delta));
            std::string h1 = fmt::format("{:<8}{:<6}", "Model", "Data");
            std::string h2 = fmt::format("{:<14}", "");
            for (QueryKind k : grid.query_kinds) {
                const std::string title = k == QueryKind::Uniform      ? "Uniform Query"
                                          : k == QueryKind::NonTrivial ? "Non-trivial Query"
                                                                       : "Trivial Query";
                h1 += fmt::format("| {:<33}", title);
                h2 += fmt::format("| {:<16} {:<16}", "success ratio", "cost ratio");
            }
            out += h1 + "\n" + h2 + "\n";
            for (std::size_t pi = 0; pi < grid.presets.size(); ++pi) {
                const std::string m = model_name(grid.presets[pi]);
                std::string line = fmt::format("{:<8}{:<6}", m, grid.presets[pi].name);
                for (QueryKind k : grid.query_kinds)
                    line += fmt::format("| {} {} ", cell(aggregate(er, m, k, steer, false)),
                                        cell(aggregate(er, m, k, steer, true)));
                out += line + "\n";
            }
            out += "\n";
        }
        if (!er.showcase.empty()) {
            out += "Showcase query, steering off:";
            for (std::size_t pi = 0; pi < grid.presets.size(); ++pi) {
                std::size_t solved = 0, total = 0;
                bool trivial = false;
                for (const auto& sr : er.showcase) {
                    if (sr.model != model_name(grid.presets[pi])) continue;
                    ++total;
                    solved += sr.result.success ? 1 : 0;
                    trivial = sr.trivial;
                }
                out += fmt::format(" {} {}/{}{}", model_name(grid.presets[pi]), solved, total, pi == 0 && trivial ? " (trivial)" : "");
            }
            out += "\n\n";
        }
    }
    return out;
}

std::string format_metrics_csv(const GridReport& rep) {
    std::string out =
        "environment,seed,model,query_kind,steer,success_ratio,cost_ratio,n_success,n_total,n_cost,n_expert_fail\n";
    for (const auto& er : rep.environments)
        for (const auto& [seed, r] : er.rows)
            out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", er.environment, seed, r.model, to_string(r.kind),
                               r.use_steer ? 1 : 0, fmt_num(r.success_ratio), fmt_num(r.cost_ratio), r.n_success,
                               r.n_total, r.n_cost, r.n_expert_fail);
    return out;
}

} // namespace ntqs
