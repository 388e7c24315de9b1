#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ntqs;

namespace {

DatasetConfig small_config(double p_nt, bool prune, int k = 60) {
    DatasetConfig cfg;
    cfg.preset = "t";
    cfg.p_nt = p_nt;
    cfg.prune = prune;
    cfg.k_train = k;
    cfg.padding = 0.1;
    cfg.seed = 17;
    cfg.gamma_samples = 2000;
    return cfg;
}

const Environment& point_env1() {
    static const Environment env = [] {
        for (auto& e : bundled_environments())
            if (e.name == "point_env1") return e;
        throw std::runtime_error("missing point_env1");
    }();
    return env;
}

bool same_sample(const DataSample& a, const DataSample& b) {
    return a.current == b.current && a.goal == b.goal && a.next == b.next && a.query_id == b.query_id;
}

} // namespace

TEST_SUITE("datagen") {

TEST_CASE("inclusion with and without pruning") {
    const Environment env = wall_environment();
    const InflatedView v(env);
    const Path path{Configuration::point(2, 2), Configuration::point(10, 17), Configuration::point(18, 2)};
    std::vector<DataSample> all, pruned;
    include_data(all, path, false, v, 0.05, 4, true);
    REQUIRE(all.size() == 2);
    CHECK(all[0].current == path[0]);
    CHECK(all[0].goal == path[2]);
    CHECK(all[0].next == path[1]);
    CHECK(all[1].current == path[1]);
    CHECK(all[1].next == path[2]);
    CHECK(all[0].query_id == 4);
    CHECK(all[0].query_non_trivial);
    CHECK_FALSE(all[0].prune_checked);

    // (10, 17) sees the goal, so only the first sample survives.
    include_data(pruned, path, true, v, 0.05);
    REQUIRE(pruned.size() == 1);
    CHECK(pruned[0].current == path[0]);
    CHECK(pruned[0].prune_checked);

    // A trivial two-point path gives one sample unpruned and none pruned.
    const Path direct{Configuration::point(2, 18), Configuration::point(18, 18)};
    std::vector<DataSample> a, b;
    include_data(a, direct, false, v, 0.05);
    include_data(b, direct, true, v, 0.05);
    CHECK(a.size() == 1);
    CHECK(b.empty());
    include_data(a, {Configuration::point(1, 1)}, false, v, 0.05);
    CHECK(a.size() == 1);
}

TEST_CASE("uniform preset never uses the non-trivial sampler") {
    const auto solved = solve_training_queries(point_env1(), small_config(0.0, false));
    REQUIRE(solved.size() == 60);
    int non_trivial = 0;
    for (const auto& sq : solved) {
        CHECK_FALSE(sq.record.sampled_non_trivial);
        CHECK_FALSE(sq.record.fallback);
        non_trivial += sq.record.non_trivial;
    }
    // Some uniform queries are non-trivial, some are not.
    CHECK(non_trivial > 5);
    CHECK(non_trivial < 55);
}

TEST_CASE("pure non-trivial preset with pruning has no trivial samples") {
    const auto cfg = small_config(1.0, true);
    const Dataset ds = generate_dataset(point_env1(), cfg);
    CHECK(count_purity_violations(ds, point_env1()) == 0);
    CHECK(ds.meta.sample_count == ds.samples.size());
    CHECK(ds.samples.size() >= 60);
    std::size_t recorded = 0;
    for (const auto& q : ds.meta.queries) {
        CHECK(q.sampled_non_trivial);
        recorded += q.n_samples;
    }
    CHECK(recorded == ds.samples.size());
    for (const auto& s : ds.samples) CHECK(s.prune_checked);
}

TEST_CASE("p_nt one flags every query and falls back rarely") {
    auto cfg = small_config(1.0, false, 150);
    const auto solved = solve_training_queries(point_env1(), cfg);
    int flagged = 0, fallbacks = 0;
    const InflatedView v(point_env1(), cfg.padding);
    for (const auto& sq : solved) {
        CHECK(sq.record.sampled_non_trivial);
        flagged += sq.record.non_trivial;
        fallbacks += sq.record.fallback;
        if (sq.record.non_trivial) CHECK_FALSE(steer_to(sq.record.query.start, sq.record.query.goal, v, 0.05));
        CHECK(sq.path.front() == sq.record.query.start);
        CHECK(sq.path.back() == sq.record.query.goal);
        CHECK(path_feasible(sq.path, v, 0.05));
    }
    CHECK(flagged + fallbacks == 150);
    CHECK(fallbacks <= 1);

    // With a one-draw budget the fallback rate is 1 - gamma.
    cfg.sampler.n_max = 1;
    const auto one = solve_training_queries(point_env1(), cfg);
    int fb = 0;
    for (const auto& sq : one) fb += sq.record.fallback;
    CHECK(fb > 15);
}

TEST_CASE("half and half preset") {
    const auto solved = solve_training_queries(point_env1(), small_config(0.5, false, 200));
    int nt = 0;
    for (const auto& sq : solved) nt += sq.record.sampled_non_trivial;
    // Binomial(200, 0.5) at about 4 sigma.
    CHECK(nt >= 72);
    CHECK(nt <= 128);
}

TEST_CASE("regeneration is byte identical and independent of jobs") {
    const auto cfg = small_config(0.5, false, 40);
    const Dataset a = generate_dataset(point_env1(), cfg, 1);
    const Dataset b = generate_dataset(point_env1(), cfg, 1);
    const Dataset c = generate_dataset(point_env1(), cfg, 4);
    CHECK(dataset_records_bytes(a) == dataset_records_bytes(b));
    CHECK(dataset_records_bytes(a) == dataset_records_bytes(c));
    CHECK(dataset_meta_json(a.meta) == dataset_meta_json(c.meta));
    auto other = cfg;
    other.seed = 18;
    CHECK(dataset_records_bytes(generate_dataset(point_env1(), other)) != dataset_records_bytes(a));
}

TEST_CASE("pruned dataset is a subset of the unpruned one") {
    const Environment env = point_env1();
    const auto solved = solve_training_queries(env, small_config(1.0, false));
    const Dataset d2 = assemble_dataset(env, small_config(1.0, false), solved);
    const Dataset d3 = assemble_dataset(env, small_config(1.0, true), solved);
    CHECK(d3.samples.size() < d2.samples.size());
    std::size_t k = 0;
    for (const auto& s : d3.samples) {
        while (k < d2.samples.size() && !same_sample(d2.samples[k], s)) ++k;
        CHECK(k < d2.samples.size());
    }
    // Generating directly agrees with assembling from shared solutions.
    CHECK(dataset_records_bytes(generate_dataset(env, small_config(1.0, true))) == dataset_records_bytes(d3));
}

TEST_CASE("rigid body dataset") {
    Environment env;
    for (auto& e : bundled_environments())
        if (e.name == "rigid_env0") env = e;
    auto cfg = small_config(1.0, true, 6);
    cfg.expert = default_expert_config(env);
    cfg.gamma_samples = 500;
    const Dataset ds = generate_dataset(env, cfg);
    CHECK(count_purity_violations(ds, env) == 0);
    for (const auto& s : ds.samples) CHECK(s.current.dim() == 3);
}

TEST_CASE("save, load and text export") {
    const auto cfg = small_config(0.5, true, 20);
    const Dataset ds = generate_dataset(point_env1(), cfg);
    const auto dir = std::filesystem::temp_directory_path() / "ntqs_datagen_test";
    std::filesystem::create_directories(dir);
    save_dataset(ds, dir / "d.ntqs");
    CHECK(std::filesystem::exists(dataset_meta_path(dir / "d.ntqs")));
    const Dataset back = load_dataset(dir / "d.ntqs");
    CHECK(dataset_records_bytes(back) == dataset_records_bytes(ds));
    CHECK(dataset_meta_json(back.meta) == dataset_meta_json(ds.meta));
    REQUIRE(back.samples.size() == ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        CHECK(same_sample(back.samples[i], ds.samples[i]));
        CHECK(back.samples[i].prune_checked == ds.samples[i].prune_checked);
    }

    const std::string csv = dataset_to_csv(ds);
    std::istringstream in(csv);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == ds.samples.size() + 1);

    {
        std::ofstream bad(dir / "bad.ntqs", std::ios::binary);
        bad << "NOTADATASET";
    }
    CHECK_THROWS_AS(load_dataset(dir / "bad.ntqs"), ParseError);
    CHECK_THROWS(load_dataset(dir / "missing.ntqs"));
}

TEST_CASE("config validation") {
    auto cfg = small_config(1.5, false);
    CHECK_THROWS_AS(validate_dataset_config(cfg), ValidationError);
    cfg = small_config(0.5, false, 0);
    CHECK_THROWS_AS(validate_dataset_config(cfg), ValidationError);
    cfg = small_config(0.5, false);
    cfg.padding = -1;
    CHECK_THROWS_AS(validate_dataset_config(cfg), ValidationError);
}

}
