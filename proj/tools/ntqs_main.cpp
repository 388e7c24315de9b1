// ntqs: command-line front end for environments, datasets, training,
// evaluation and experiment grids.

#include "ntqs/bench.hpp"
#include "ntqs/error.hpp"
#include "ntqs/svg.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace ntqs;

namespace {

json read_json_file(const fs::path& path) {
    try {
        return json::parse(read_file(path), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

json file_entry(const fs::path& path) { return {{"path", path.string()}, {"sha256", sha256_file(path)}}; }

/// Writes the manifest and prints its path on stdout.
void emit_manifest(const fs::path& path, const std::string& subcommand, json config, json inputs, json outputs) {
    json m = {{"subcommand", subcommand},
              {"tool_version", kToolVersion},
              {"config", std::move(config)},
              {"inputs", std::move(inputs)},
              {"outputs", std::move(outputs)}};
    write_file_atomic(path, m.dump(2) + "\n");
    fmt::print("manifest: {}\n", path.string());
}

/// "--name", plus a "--dashed-name" alias when the name has underscores.
std::string flag(const std::string& name) {
    std::string dashed = name;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    return dashed == name ? "--" + name : "--" + name + ",--" + dashed;
}

/// Canonical (underscore) name of an option, without leading dashes.
std::string key(const CLI::Option* opt) { return opt->get_single_name(); }

fs::path with_suffix(const fs::path& p, const std::string& suffix) { return fs::path(p.string() + suffix); }

// Option groups mirror the config struct field names.

void add_sampler_options(CLI::App* app, SamplerConfig& c) {
    app->add_option(flag("n_max"), c.n_max, "Non-trivial sampler attempts before fallback");
    app->add_option(flag("config_attempts"), c.config_attempts, "Rejection draws per configuration");
}

void add_expert_options(CLI::App* app, ExpertConfig& c, std::string& kind, const std::string& prefix) {
    app->add_option(flag(prefix + "planner"), kind, "grid_astar | rrt_star (default depends on the robot)");
    app->add_option(flag(prefix + "cell_size"), c.cell_size, "Grid A* lattice spacing");
    app->add_option(flag(prefix + "iterations"), c.iterations, "RRT* iterations");
    app->add_option(flag(prefix + "step_size"), c.step_size, "RRT* extension length");
    app->add_option(flag(prefix + "goal_bias"), c.goal_bias, "RRT* goal sampling probability");
    app->add_option(flag(prefix + "rewire_gamma"), c.rewire_gamma, "RRT* rewire radius constant");
    app->add_option(flag(prefix + "rewire_max"), c.rewire_max, "RRT* rewire radius cap");
    app->add_option(flag(prefix + "smoothing_rounds"), c.smoothing_rounds, "Random shortcut rounds");
}

void add_train_options(CLI::App* app, TrainConfig& c, std::string& hidden, std::string& activation,
                       std::string& encoding) {
    app->add_option("--epochs", c.epochs);
    app->add_option(flag("batch_size"), c.batch_size);
    app->add_option(flag("learning_rate"), c.learning_rate);
    app->add_option("--beta1", c.beta1);
    app->add_option("--beta2", c.beta2);
    app->add_option("--epsilon", c.epsilon);
    app->add_option(flag("lr_decay"), c.lr_decay);
    app->add_option(flag("validation_split"), c.validation_split);
    app->add_option("--hidden", hidden, "Hidden layer widths, comma separated (e.g. 256,256,256,256)");
    app->add_option("--activation", activation, "relu | tanh");
    app->add_option(flag("angle_encoding"), encoding, "sincos | wrapped");
}

void apply_shape(TrainConfig& c, const std::string& hidden, const std::string& activation, const std::string& encoding) {
    if (!hidden.empty()) {
        c.shape.hidden.clear();
        std::size_t pos = 0;
        while (pos <= hidden.size()) {
            const std::size_t comma = std::min(hidden.find(',', pos), hidden.size());
            try {
                c.shape.hidden.push_back(std::stoi(hidden.substr(pos, comma - pos)));
            } catch (const std::exception&) {
                throw ValidationError("hidden", fmt::format("bad layer list '{}'", hidden));
            }
            pos = comma + 1;
        }
    }
    if (!activation.empty()) c.shape.hidden_activation = parse_activation(activation);
    if (!encoding.empty()) c.shape.encoding = parse_angle_encoding(encoding);
}

void add_planner_options(CLI::App* app, PlannerConfig& c, bool& no_steer) {
    app->add_option(flag("n_plan"), c.n_plan, "Rollout steps");
    app->add_flag("--no-steer", no_steer, "Disable greedy steering (goal tolerance --delta)");
    app->add_option("--delta", c.delta, "Goal tolerance without steering");
    app->add_option(flag("replan_depth"), c.replan_depth);
    app->add_option(flag("replan_segment_cap"), c.replan_segment_cap);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-trivial query sampling for learned motion planners"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    std::size_t jobs = default_jobs();
    app.add_option("--jobs", jobs, "Worker threads (0 = all cores)");

    // gen-env
    auto* gen_env = app.add_subcommand("gen-env", "Write the bundled environments as JSON files");
    fs::path env_out = "envs";
    gen_env->add_option("--out", env_out, "Output directory");

    // gamma
    auto* gamma = app.add_subcommand("gamma", "Estimate the non-triviality ratio of an environment");
    fs::path gamma_env;
    std::uint64_t gamma_n = 100000, gamma_seed = 1;
    double gamma_padding = 0.0, gamma_res = 0.0;
    fs::path gamma_manifest = "gamma.manifest.json";
    gamma->add_option("--env", gamma_env, "Environment file")->required();
    gamma->add_option("--n", gamma_n, "Uniform query samples");
    gamma->add_option("--seed", gamma_seed);
    gamma->add_option("--padding", gamma_padding);
    gamma->add_option("--resolution", gamma_res);
    gamma->add_option("--manifest", gamma_manifest);

    // gen-data
    auto* gen_data = app.add_subcommand("gen-data", "Generate a training dataset with an expert planner");
    fs::path data_env, data_out, data_config, data_csv;
    std::string data_preset, data_expert_kind;
    DatasetConfig dc;
    std::optional<double> data_p_nt;
    std::optional<bool> data_prune;
    gen_data->add_option("--env", data_env, "Environment file")->required();
    gen_data->add_option("--out", data_out, "Dataset file")->required();
    gen_data->add_option("--config", data_config, "DatasetConfig JSON; flags override it");
    gen_data->add_option("--preset", data_preset, "D0 | D1 | D2 | D3");
    gen_data->add_option(flag("p_nt"), data_p_nt, "Probability of a non-trivial query");
    gen_data->add_option("--prune", data_prune, "Drop samples that already steer to the goal (true/false)");
    gen_data->add_option(flag("k_train"), dc.k_train);
    gen_data->add_option("--padding", dc.padding);
    gen_data->add_option("--resolution", dc.resolution);
    gen_data->add_option("--seed", dc.seed);
    gen_data->add_option(flag("max_attempts_per_query"), dc.max_attempts_per_query);
    gen_data->add_option(flag("max_total_failures"), dc.max_total_failures);
    gen_data->add_option(flag("gamma_samples"), dc.gamma_samples);
    gen_data->add_option("--csv", data_csv, "Also export the samples as CSV");
    add_sampler_options(gen_data, dc.sampler);
    ExpertConfig data_expert_flags;
    add_expert_options(gen_data, data_expert_flags, data_expert_kind, "");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a next-state network on a dataset");
    fs::path train_data, train_env, train_out, train_config;
    TrainConfig tc;
    std::string hidden, activation, encoding;
    train_cmd->add_option("--data", train_data, "Dataset file")->required();
    train_cmd->add_option("--env", train_env, "Environment file")->required();
    train_cmd->add_option("--out", train_out, "Model file")->required();
    train_cmd->add_option("--config", train_config, "TrainConfig JSON; flags override it");
    train_cmd->add_option("--seed", tc.seed);
    add_train_options(train_cmd, tc, hidden, activation, encoding);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model against the expert on fresh test queries");
    fs::path eval_env, eval_model, eval_out;
    std::string eval_kind = "uniform", eval_expert_kind;
    int eval_k = 200;
    std::uint64_t eval_seed = 1;
    double eval_res = 0.0;
    PlannerConfig pc;
    bool no_steer = false;
    ExpertConfig eval_expert_flags;
    SamplerConfig eval_sampler;
    eval_cmd->add_option("--env", eval_env, "Environment file")->required();
    eval_cmd->add_option("--model", eval_model, "Model file")->required();
    eval_cmd->add_option("--out", eval_out, "Metrics JSON file")->required();
    eval_cmd->add_option("--kind", eval_kind, "uniform | non_trivial | trivial");
    eval_cmd->add_option(flag("k_test"), eval_k);
    eval_cmd->add_option("--seed", eval_seed);
    eval_cmd->add_option("--resolution", eval_res);
    add_planner_options(eval_cmd, pc, no_steer);
    add_sampler_options(eval_cmd, eval_sampler);
    add_expert_options(eval_cmd, eval_expert_flags, eval_expert_kind, "");

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "Run a full experiment grid from a configuration file");
    fs::path grid_config, grid_out = "out";
    grid_cmd->add_option("--config", grid_config, "Grid configuration JSON")->required();
    grid_cmd->add_option("--out", grid_out, "Output directory");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "Render an environment with optional dataset overlays as SVG");
    fs::path plot_env, plot_out, plot_data;
    double plot_padding = 0.0;
    std::size_t plot_queries = 300, plot_paths = 0;
    plot_cmd->add_option("--env", plot_env, "Environment file")->required();
    plot_cmd->add_option("--out", plot_out, "SVG file")->required();
    plot_cmd->add_option("--data", plot_data, "Dataset whose queries (and paths) are drawn");
    plot_cmd->add_option("--queries", plot_queries, "Maximum query pairs to scatter");
    plot_cmd->add_option("--paths", plot_paths, "Expert paths to draw from an unpruned dataset");
    plot_cmd->add_option("--padding", plot_padding, "Draw padded obstacle outlines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*gen_env) {
            json outputs = json::array();
            for (const auto& e : bundled_environments()) {
                const fs::path p = env_out / (e.name + ".json");
                save_environment(e, p);
                outputs.push_back(file_entry(p));
                fmt::print("{}\n", p.string());
            }
            emit_manifest(env_out / "gen-env.manifest.json", "gen-env", json::object(), json::array(), outputs);
        } else if (*gamma) {
            const Environment env = load_environment(gamma_env);
            validate_environment(env);
            const InflatedView view(env, gamma_padding);
            Rng rng(gamma_seed);
            const double res = effective_resolution(gamma_res, env);
            const GammaEstimate g = estimate_gamma_nt(view, gamma_n, rng, res);
            fmt::print("gamma_nt = {:.4f} ± {:.4f} ({} of {} queries non-trivial)\n", g.gamma, g.half_width,
                       g.non_trivial, g.samples);
            emit_manifest(gamma_manifest, "gamma",
                          {{"n", gamma_n}, {"seed", gamma_seed}, {"padding", gamma_padding}, {"resolution", res}},
                          json::array({file_entry(gamma_env)}), {{"estimate", g}});
        } else if (*gen_data) {
            const Environment env = load_environment(data_env);
            validate_environment(env);
            // Precedence: expert defaults for the robot, then --config, then flags.
            DatasetConfig cfg;
            cfg.expert = default_expert_config(env);
            if (!data_config.empty()) from_json(read_json_file(data_config), cfg);
            json flags = json::object();
            for (const auto* opt : gen_data->get_options()) {
                if (opt->count() == 0) continue;
                flags[key(opt)] = true;
            }
            auto take = [&](const char* name, auto& dst, const auto& src) {
                if (flags.contains(name)) dst = src;
            };
            take("k_train", cfg.k_train, dc.k_train);
            take("padding", cfg.padding, dc.padding);
            take("resolution", cfg.resolution, dc.resolution);
            take("seed", cfg.seed, dc.seed);
            take("max_attempts_per_query", cfg.max_attempts_per_query, dc.max_attempts_per_query);
            take("max_total_failures", cfg.max_total_failures, dc.max_total_failures);
            take("gamma_samples", cfg.gamma_samples, dc.gamma_samples);
            take("n_max", cfg.sampler.n_max, dc.sampler.n_max);
            take("config_attempts", cfg.sampler.config_attempts, dc.sampler.config_attempts);
            if (!data_expert_kind.empty()) {
                cfg.expert.kind = parse_planner_kind(data_expert_kind);
            }
            take("cell_size", cfg.expert.cell_size, data_expert_flags.cell_size);
            take("iterations", cfg.expert.iterations, data_expert_flags.iterations);
            take("step_size", cfg.expert.step_size, data_expert_flags.step_size);
            take("goal_bias", cfg.expert.goal_bias, data_expert_flags.goal_bias);
            take("rewire_gamma", cfg.expert.rewire_gamma, data_expert_flags.rewire_gamma);
            take("rewire_max", cfg.expert.rewire_max, data_expert_flags.rewire_max);
            take("smoothing_rounds", cfg.expert.smoothing_rounds, data_expert_flags.smoothing_rounds);
            if (!data_preset.empty()) {
                bool found = false;
                for (const auto& p : standard_presets()) {
                    if (p.name != data_preset) continue;
                    cfg.preset = p.name;
                    cfg.p_nt = p.p_nt;
                    cfg.prune = p.prune;
                    found = true;
                }
                if (!found) throw ValidationError("preset", fmt::format("unknown preset '{}'", data_preset));
            }
            if (data_p_nt) cfg.p_nt = *data_p_nt;
            if (data_prune) cfg.prune = *data_prune;

            const Dataset ds = generate_dataset(env, cfg, jobs);
            save_dataset(ds, data_out);
            json outputs = json::array({file_entry(data_out), file_entry(dataset_meta_path(data_out))});
            if (!data_csv.empty()) {
                write_file_atomic(data_csv, dataset_to_csv(ds));
                outputs.push_back(file_entry(data_csv));
            }
            fmt::print("{} samples from {} queries ({} fallbacks, {} expert failures), padded gamma_nt = {:.3f}\n",
                       ds.samples.size(), ds.meta.queries.size(), ds.meta.fallbacks, ds.meta.expert_failures,
                       ds.meta.gamma.gamma);
            emit_manifest(with_suffix(data_out, ".manifest.json"), "gen-data", cfg, json::array({file_entry(data_env)}),
                          outputs);
        } else if (*train_cmd) {
            const Environment env = load_environment(train_env);
            TrainConfig cfg;
            if (!train_config.empty()) from_json(read_json_file(train_config), cfg);
            // Flags given explicitly override the file.
            json given = json::object();
            for (const auto* opt : train_cmd->get_options())
                if (opt->count() > 0) given[key(opt)] = true;
            auto take = [&](const char* name, auto& dst, const auto& src) {
                if (given.contains(name)) dst = src;
            };
            take("seed", cfg.seed, tc.seed);
            take("epochs", cfg.epochs, tc.epochs);
            take("batch_size", cfg.batch_size, tc.batch_size);
            take("learning_rate", cfg.learning_rate, tc.learning_rate);
            take("beta1", cfg.beta1, tc.beta1);
            take("beta2", cfg.beta2, tc.beta2);
            take("epsilon", cfg.epsilon, tc.epsilon);
            take("lr_decay", cfg.lr_decay, tc.lr_decay);
            take("validation_split", cfg.validation_split, tc.validation_split);
            apply_shape(cfg, hidden, activation, encoding);
            const Dataset ds = load_dataset(train_data);
            TrainReport rep;
            const MlpModel model = train(ds, env, cfg, &rep);
            save_model(model, train_out);
            const fs::path log = with_suffix(train_out, ".train.json");
            write_file_atomic(log, json({{"train_loss", rep.train_loss},
                                         {"val_loss", rep.val_loss},
                                         {"train_samples", rep.train_samples},
                                         {"val_samples", rep.val_samples}})
                                       .dump(1));
            fmt::print("trained on {} samples: loss {:.6f} -> {:.6f}\n", rep.train_samples, rep.train_loss.front(),
                       rep.train_loss.back());
            emit_manifest(with_suffix(train_out, ".manifest.json"), "train", cfg,
                          json::array({file_entry(train_data), file_entry(train_env)}),
                          json::array({file_entry(train_out), file_entry(log)}));
        } else if (*eval_cmd) {
            const Environment env = load_environment(eval_env);
            validate_environment(env);
            const MlpModel model = load_model(eval_model);
            const InflatedView view(env, 0.0);
            const double res = effective_resolution(eval_res, env);
            ExpertConfig ex = default_expert_config(env);
            if (!eval_expert_kind.empty()) ex.kind = parse_planner_kind(eval_expert_kind);
            for (const auto* opt : eval_cmd->get_options()) {
                if (opt->count() == 0) continue;
                const std::string n = key(opt);
                if (n == "cell_size") ex.cell_size = eval_expert_flags.cell_size;
                if (n == "iterations") ex.iterations = eval_expert_flags.iterations;
                if (n == "step_size") ex.step_size = eval_expert_flags.step_size;
                if (n == "goal_bias") ex.goal_bias = eval_expert_flags.goal_bias;
                if (n == "rewire_gamma") ex.rewire_gamma = eval_expert_flags.rewire_gamma;
                if (n == "rewire_max") ex.rewire_max = eval_expert_flags.rewire_max;
                if (n == "smoothing_rounds") ex.smoothing_rounds = eval_expert_flags.smoothing_rounds;
            }
            pc.use_steer = !no_steer;
            pc.resolution = eval_res;
            const QueryKind kind = parse_query_kind(eval_kind);
            const auto tests = make_test_set(view, kind, eval_k, eval_seed, ex, eval_sampler, res, jobs);
            const MetricRow row = evaluate(eval_model.stem().string(), model_predictor(model), view, tests, kind, pc, jobs);
            fmt::print("{} {} steer={}: success ratio {:.3f} ({}/{}), cost ratio {:.3f} over {} queries, {} expert failures\n",
                       row.model, to_string(kind), pc.use_steer ? "on" : "off", row.success_ratio, row.n_success,
                       row.n_total, row.cost_ratio, row.n_cost, row.n_expert_fail);
            json result = {{"model", row.model},
                           {"query_kind", to_string(kind)},
                           {"use_steer", pc.use_steer},
                           {"success_ratio", row.success_ratio},
                           {"cost_ratio", std::isnan(row.cost_ratio) ? json(nullptr) : json(row.cost_ratio)},
                           {"n_success", row.n_success},
                           {"n_total", row.n_total},
                           {"n_cost", row.n_cost},
                           {"n_expert_fail", row.n_expert_fail}};
            write_file_atomic(eval_out, result.dump(2) + "\n");
            emit_manifest(with_suffix(eval_out, ".manifest.json"), "eval",
                          {{"kind", eval_kind}, {"k_test", eval_k}, {"seed", eval_seed}, {"planner", pc}, {"expert", ex},
                           {"sampler", eval_sampler}},
                          json::array({file_entry(eval_env), file_entry(eval_model)}), json::array({file_entry(eval_out)}));
        } else if (*grid_cmd) {
            const ExperimentGrid grid = load_grid(grid_config);
            run_grid(grid, grid_out, jobs);
            std::cout << read_file(grid_out / "report.txt");
            fmt::print("manifest: {}\n", (grid_out / "manifest.json").string());
        } else if (*plot_cmd) {
            const Environment env = load_environment(plot_env);
            SvgOverlays ov;
            ov.title = env.name;
            ov.padding = plot_padding;
            json inputs = json::array({file_entry(plot_env)});
            if (!plot_data.empty()) {
                const Dataset ds = load_dataset(plot_data);
                for (std::size_t i = 0; i < ds.meta.queries.size() && i < plot_queries; ++i)
                    ov.queries.push_back(ds.meta.queries[i].query);
                if (plot_paths > 0 && !ds.meta.config.prune) {
                    std::uint64_t current = ~0ULL;
                    for (const auto& s : ds.samples) {
                        if (s.query_id != current) {
                            if (ov.paths.size() == plot_paths) break;
                            ov.paths.push_back({s.current});
                            current = s.query_id;
                        }
                        ov.paths.back().push_back(s.next);
                    }
                }
                inputs.push_back(file_entry(plot_data));
            }
            write_svg(env, ov, plot_out);
            emit_manifest(with_suffix(plot_out, ".manifest.json"), "plot",
                          {{"padding", plot_padding}, {"queries", plot_queries}, {"paths", plot_paths}}, inputs,
                          json::array({file_entry(plot_out)}));
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
