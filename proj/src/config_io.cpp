#include "ntqs/config_io.hpp"

#include "ntqs/error.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace ntqs {

json config_to_json(const Configuration& c) {
    json a = json::array();
    for (double v : c.values()) a.push_back(v);
    return a;
}

Configuration config_from_json(const json& j, ConfigKind kind) {
    if (!j.is_array()) throw ParseError("configuration must be an array of numbers");
    std::vector<double> v;
    for (const auto& x : j) {
        if (!x.is_number()) throw ParseError("configuration must be an array of numbers");
        v.push_back(x.get<double>());
    }
    return Configuration::from_values(kind, v);
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw ValidationError(where, "expected an object");
    for (const auto& [key, _] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) throw ValidationError(fmt::format("{}.{}", where, key), "unknown field");
    }
}

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

void to_json(json& j, const ExpertConfig& c) {
    j = {{"kind", std::string(to_string(c.kind))},
         {"cell_size", c.cell_size},
         {"iterations", c.iterations},
         {"step_size", c.step_size},
         {"goal_bias", c.goal_bias},
         {"rewire_gamma", c.rewire_gamma},
         {"rewire_max", c.rewire_max},
         {"seed", c.seed},
         {"smoothing_rounds", c.smoothing_rounds},
         {"resolution", c.resolution}};
}

void from_json(const json& j, ExpertConfig& c) {
    reject_unknown_keys(j,
                        {"kind", "cell_size", "iterations", "step_size", "goal_bias", "rewire_gamma", "rewire_max", "seed",
                         "smoothing_rounds", "resolution"},
                        "expert");
    if (j.contains("kind")) c.kind = parse_planner_kind(j.at("kind").get<std::string>());
    read(j, "cell_size", c.cell_size);
    read(j, "iterations", c.iterations);
    read(j, "step_size", c.step_size);
    read(j, "goal_bias", c.goal_bias);
    read(j, "rewire_gamma", c.rewire_gamma);
    read(j, "rewire_max", c.rewire_max);
    read(j, "seed", c.seed);
    read(j, "smoothing_rounds", c.smoothing_rounds);
    read(j, "resolution", c.resolution);
}

void to_json(json& j, const SamplerConfig& c) {
    j = {{"n_max", c.n_max}, {"seed", c.seed}, {"resolution", c.resolution}, {"config_attempts", c.config_attempts}};
}

void from_json(const json& j, SamplerConfig& c) {
    reject_unknown_keys(j, {"n_max", "seed", "resolution", "config_attempts"}, "sampler");
    read(j, "n_max", c.n_max);
    read(j, "seed", c.seed);
    read(j, "resolution", c.resolution);
    read(j, "config_attempts", c.config_attempts);
}

void to_json(json& j, const DatasetConfig& c) {
    j = {{"preset", c.preset},
         {"p_nt", c.p_nt},
         {"prune", c.prune},
         {"k_train", c.k_train},
         {"padding", c.padding},
         {"resolution", c.resolution},
         {"expert", c.expert},
         {"sampler", c.sampler},
         {"seed", c.seed},
         {"max_attempts_per_query", c.max_attempts_per_query},
         {"max_total_failures", c.max_total_failures},
         {"gamma_samples", c.gamma_samples}};
}

void from_json(const json& j, DatasetConfig& c) {
    reject_unknown_keys(j,
                        {"preset", "p_nt", "prune", "k_train", "padding", "resolution", "expert", "sampler", "seed",
                         "max_attempts_per_query", "max_total_failures", "gamma_samples"},
                        "dataset");
    read(j, "preset", c.preset);
    read(j, "p_nt", c.p_nt);
    read(j, "prune", c.prune);
    read(j, "k_train", c.k_train);
    read(j, "padding", c.padding);
    read(j, "resolution", c.resolution);
    read(j, "expert", c.expert);
    read(j, "sampler", c.sampler);
    read(j, "seed", c.seed);
    read(j, "max_attempts_per_query", c.max_attempts_per_query);
    read(j, "max_total_failures", c.max_total_failures);
    read(j, "gamma_samples", c.gamma_samples);
}

void to_json(json& j, const ModelShape& c) {
    j = {{"hidden", c.hidden},
         {"hidden_activation", std::string(to_string(c.hidden_activation))},
         {"encoding", std::string(to_string(c.encoding))}};
}

void from_json(const json& j, ModelShape& c) {
    reject_unknown_keys(j, {"hidden", "hidden_activation", "encoding"}, "shape");
    read(j, "hidden", c.hidden);
    if (j.contains("hidden_activation")) c.hidden_activation = parse_activation(j.at("hidden_activation").get<std::string>());
    if (j.contains("encoding")) c.encoding = parse_angle_encoding(j.at("encoding").get<std::string>());
}

void to_json(json& j, const TrainConfig& c) {
    j = {{"epochs", c.epochs},
         {"batch_size", c.batch_size},
         {"learning_rate", c.learning_rate},
         {"beta1", c.beta1},
         {"beta2", c.beta2},
         {"epsilon", c.epsilon},
         {"lr_decay", c.lr_decay},
         {"seed", c.seed},
         {"validation_split", c.validation_split},
         {"shape", c.shape}};
}

void from_json(const json& j, TrainConfig& c) {
    reject_unknown_keys(j,
                        {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon", "lr_decay", "seed",
                         "validation_split", "shape"},
                        "train");
    read(j, "epochs", c.epochs);
    read(j, "batch_size", c.batch_size);
    read(j, "learning_rate", c.learning_rate);
    read(j, "beta1", c.beta1);
    read(j, "beta2", c.beta2);
    read(j, "epsilon", c.epsilon);
    read(j, "lr_decay", c.lr_decay);
    read(j, "seed", c.seed);
    read(j, "validation_split", c.validation_split);
    read(j, "shape", c.shape);
}

void to_json(json& j, const PlannerConfig& c) {
    j = {{"n_plan", c.n_plan},
         {"resolution", c.resolution},
         {"use_steer", c.use_steer},
         {"delta", c.delta},
         {"replan_depth", c.replan_depth},
         {"replan_segment_cap", c.replan_segment_cap}};
}

void from_json(const json& j, PlannerConfig& c) {
    reject_unknown_keys(j, {"n_plan", "resolution", "use_steer", "delta", "replan_depth", "replan_segment_cap"}, "planner");
    read(j, "n_plan", c.n_plan);
    read(j, "resolution", c.resolution);
    read(j, "use_steer", c.use_steer);
    read(j, "delta", c.delta);
    read(j, "replan_depth", c.replan_depth);
    read(j, "replan_segment_cap", c.replan_segment_cap);
}

void to_json(json& j, const GammaEstimate& g) {
    j = {{"gamma", g.gamma}, {"half_width", g.half_width}, {"non_trivial", g.non_trivial}, {"samples", g.samples}};
}

} // namespace ntqs
