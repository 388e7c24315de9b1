#include "ntqs/datagen.hpp"

#include "ntqs/config_io.hpp"
#include "ntqs/error.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>

namespace ntqs {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

void validate_dataset_config(const DatasetConfig& cfg) {
    if (!(cfg.p_nt >= 0.0 && cfg.p_nt <= 1.0)) throw ValidationError("dataset.p_nt", "must lie in [0, 1]");
    if (cfg.k_train < 1) throw ValidationError("dataset.k_train", "must be >= 1");
    if (!(cfg.padding >= 0.0)) throw ValidationError("dataset.padding", "must be >= 0");
    if (cfg.resolution < 0.0) throw ValidationError("dataset.resolution", "must be >= 0");
    if (cfg.max_attempts_per_query < 1) throw ValidationError("dataset.max_attempts_per_query", "must be >= 1");
    if (cfg.gamma_samples < 1) throw ValidationError("dataset.gamma_samples", "must be >= 1");
    validate_expert_config(cfg.expert);
    validate_sampler_config(cfg.sampler);
}

void include_data(std::vector<DataSample>& data, const Path& path, bool prune, const InflatedView& view, double resolution,
                  std::uint64_t query_id, bool query_non_trivial) {
    if (path.size() < 2) return;
    const Configuration& end = path.back();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (prune && steer_to(path[i], end, view, resolution)) continue;
        data.push_back({path[i], end, path[i + 1], query_id, query_non_trivial, prune});
    }
}

std::vector<SolvedQuery> solve_training_queries(const Environment& env, const DatasetConfig& cfg, std::size_t jobs) {
    validate_dataset_config(cfg);
    const InflatedView view(env, cfg.padding);
    const double res = effective_resolution(cfg.resolution, env);
    SamplerConfig sampler = cfg.sampler;
    sampler.resolution = res;
    ExpertConfig expert = cfg.expert;
    expert.resolution = res;

    const auto k = static_cast<std::size_t>(cfg.k_train);
    std::vector<SolvedQuery> solved(k);
    std::vector<int> failures(k, 0);
    parallel_for(k, jobs, [&](std::size_t j) {
        Rng slot_rng(derive_seed(cfg.seed, {0xd47a, j}));
        const bool use_nt = slot_rng.bernoulli(cfg.p_nt);
        for (int a = 0; a < cfg.max_attempts_per_query; ++a) {
            const auto a64 = static_cast<std::uint64_t>(a);
            Rng rng(derive_seed(cfg.seed, {0x9e7, j, a64}));
            SolvedQuery sq;
            sq.record.id = j;
            sq.record.sampled_non_trivial = use_nt;
            if (use_nt) {
                const auto s = non_trivial_query(view, sampler, rng);
                sq.record.query = s.query;
                sq.record.non_trivial = s.non_trivial;
                sq.record.fallback = !s.non_trivial;
            } else {
                sq.record.query = uniform_query(view, rng, sampler.config_attempts);
                sq.record.non_trivial = !steer_to(sq.record.query.start, sq.record.query.goal, view, res);
            }
            ExpertConfig ex = expert;
            ex.seed = derive_seed(cfg.expert.seed, {cfg.seed, j, a64});
            auto result = solve_query(sq.record.query, view, ex);
            sq.record.expert_attempts = a + 1;
            if (result.success) {
                sq.record.expert_cost = result.cost;
                sq.record.path_length = result.path.size();
                sq.path = std::move(result.path);
                solved[j] = std::move(sq);
                return;
            }
            ++failures[j];
        }
        throw BudgetExhausted(fmt::format("query slot {} failed {} expert attempts", j, cfg.max_attempts_per_query));
    });

    long total = 0;
    for (int f : failures) total += f;
    const long cap = cfg.max_total_failures < 0 ? cfg.k_train : cfg.max_total_failures;
    if (total > cap)
        throw BudgetExhausted(fmt::format("expert failed {} times, above the retry cap of {}", total, cap));
    return solved;
}

Dataset assemble_dataset(const Environment& env, const DatasetConfig& cfg, const std::vector<SolvedQuery>& solved) {
    validate_dataset_config(cfg);
    const InflatedView view(env, cfg.padding);
    const double res = effective_resolution(cfg.resolution, env);

    Dataset ds;
    auto& meta = ds.meta;
    meta.config = cfg;
    meta.environment = env.name;
    meta.environment_hash = sha256_hex(environment_to_json(env));
    meta.resolution = res;
    meta.tool_version = std::string(kToolVersion);
    for (const auto& sq : solved) {
        const std::size_t before = ds.samples.size();
        include_data(ds.samples, sq.path, cfg.prune, view, res, sq.record.id, sq.record.non_trivial);
        QueryRecord rec = sq.record;
        rec.n_samples = ds.samples.size() - before;
        meta.expert_failures += static_cast<std::uint64_t>(rec.expert_attempts - 1);
        meta.fallbacks += rec.fallback ? 1 : 0;
        meta.queries.push_back(std::move(rec));
    }
    meta.sample_count = ds.samples.size();
    Rng gamma_rng(derive_seed(cfg.seed, {0x6a33a}));
    meta.gamma = estimate_gamma_nt(view, cfg.gamma_samples, gamma_rng, res);
    return ds;
}

Dataset generate_dataset(const Environment& env, const DatasetConfig& cfg, std::size_t jobs) {
    return assemble_dataset(env, cfg, solve_training_queries(env, cfg, jobs));
}

std::size_t count_purity_violations(const Dataset& ds, const Environment& env) {
    const InflatedView view(env, ds.meta.config.padding);
    std::size_t bad = 0;
    for (const auto& s : ds.samples)
        if (steer_to(s.current, s.goal, view, ds.meta.resolution)) ++bad;
    return bad;
}

// Record file layout (little-endian):
//   "NTQSDATA" u32 version u8 kind u8 dim u16 reserved u64 count
//   count x { u64 query_id, u32 flags, f64 current[dim], f64 goal[dim], f64 next[dim] }
// flags: bit 0 query_non_trivial, bit 1 prune_checked.

namespace {

constexpr char kDataMagic[8] = {'N', 'T', 'Q', 'S', 'D', 'A', 'T', 'A'};
constexpr std::uint32_t kDataVersion = 1;

template <class T>
void put(std::string& out, const T& v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw ParseError("dataset file truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

json query_record_to_json(const QueryRecord& r) {
    return {{"id", r.id},
            {"start", config_to_json(r.query.start)},
            {"goal", config_to_json(r.query.goal)},
            {"sampled_non_trivial", r.sampled_non_trivial},
            {"non_trivial", r.non_trivial},
            {"fallback", r.fallback},
            {"expert_attempts", r.expert_attempts},
            {"n_samples", r.n_samples},
            {"expert_cost", r.expert_cost},
            {"path_length", r.path_length}};
}

} // namespace

std::string dataset_records_bytes(const Dataset& ds) {
    std::string out;
    out.append(kDataMagic, sizeof(kDataMagic));
    const ConfigKind kind = ds.samples.empty() ? ConfigKind::Point2 : ds.samples.front().current.kind();
    const std::size_t dim = ds.samples.empty() ? 0 : ds.samples.front().current.dim();
    put(out, kDataVersion);
    put(out, static_cast<std::uint8_t>(kind));
    put(out, static_cast<std::uint8_t>(dim));
    put(out, std::uint16_t{0});
    put(out, static_cast<std::uint64_t>(ds.samples.size()));
    for (const auto& s : ds.samples) {
        put(out, s.query_id);
        put(out, static_cast<std::uint32_t>((s.query_non_trivial ? 1u : 0u) | (s.prune_checked ? 2u : 0u)));
        for (const auto* c : {&s.current, &s.goal, &s.next})
            for (double v : c->values()) put(out, v);
    }
    return out;
}

std::string dataset_meta_json(const DatasetMeta& meta) {
    json queries = json::array();
    for (const auto& q : meta.queries) queries.push_back(query_record_to_json(q));
    json j = {{"format", "ntqs-dataset-meta"},
              {"version", kDataVersion},
              {"tool_version", meta.tool_version},
              {"environment", meta.environment},
              {"environment_hash", meta.environment_hash},
              {"config", meta.config},
              {"resolution", meta.resolution},
              {"gamma_nt", meta.gamma},
              {"expert_failures", meta.expert_failures},
              {"fallbacks", meta.fallbacks},
              {"sample_count", meta.sample_count},
              {"queries", queries}};
    return j.dump(1) + "\n";
}

std::filesystem::path dataset_meta_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".meta.json";
    return p;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    write_file_atomic(path, dataset_records_bytes(ds));
    write_file_atomic(dataset_meta_path(path), dataset_meta_json(ds.meta));
}

Dataset load_dataset(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < sizeof(kDataMagic) || std::memcmp(bytes.data(), kDataMagic, sizeof(kDataMagic)) != 0)
        throw ParseError(path.string() + ": not a dataset file");
    std::size_t pos = sizeof(kDataMagic);
    const auto version = take<std::uint32_t>(bytes, pos);
    if (version != kDataVersion) throw ParseError(fmt::format("{}: unsupported dataset version {}", path.string(), version));
    const auto kind_raw = take<std::uint8_t>(bytes, pos);
    if (kind_raw > 2) throw ParseError(path.string() + ": bad configuration kind");
    const auto kind = static_cast<ConfigKind>(kind_raw);
    const auto dim = take<std::uint8_t>(bytes, pos);
    take<std::uint16_t>(bytes, pos);
    const auto count = take<std::uint64_t>(bytes, pos);
    const std::size_t record = 12 + 3 * 8 * static_cast<std::size_t>(dim);
    if (bytes.size() - pos != count * record) throw ParseError(path.string() + ": record count does not match file size");

    Dataset ds;
    ds.samples.reserve(count);
    std::vector<double> buf(dim);
    auto read_config = [&] {
        for (auto& v : buf) v = take<double>(bytes, pos);
        return Configuration::from_values(kind, buf);
    };
    for (std::uint64_t i = 0; i < count; ++i) {
        DataSample s;
        s.query_id = take<std::uint64_t>(bytes, pos);
        const auto flags = take<std::uint32_t>(bytes, pos);
        s.query_non_trivial = flags & 1u;
        s.prune_checked = flags & 2u;
        s.current = read_config();
        s.goal = read_config();
        s.next = read_config();
        ds.samples.push_back(s);
    }

    json j;
    try {
        j = json::parse(read_file(dataset_meta_path(path)));
        auto& m = ds.meta;
        m.tool_version = j.at("tool_version").get<std::string>();
        m.environment = j.at("environment").get<std::string>();
        m.environment_hash = j.at("environment_hash").get<std::string>();
        m.config = j.at("config").get<DatasetConfig>();
        m.resolution = j.at("resolution").get<double>();
        const auto& g = j.at("gamma_nt");
        m.gamma = {g.at("gamma").get<double>(), g.at("half_width").get<double>(), g.at("non_trivial").get<std::uint64_t>(),
                   g.at("samples").get<std::uint64_t>()};
        m.expert_failures = j.at("expert_failures").get<std::uint64_t>();
        m.fallbacks = j.at("fallbacks").get<std::uint64_t>();
        m.sample_count = j.at("sample_count").get<std::uint64_t>();
        for (const auto& q : j.at("queries")) {
            QueryRecord r;
            r.id = q.at("id").get<std::uint64_t>();
            r.query.start = config_from_json(q.at("start"), kind);
            r.query.goal = config_from_json(q.at("goal"), kind);
            r.sampled_non_trivial = q.at("sampled_non_trivial").get<bool>();
            r.non_trivial = q.at("non_trivial").get<bool>();
            r.fallback = q.at("fallback").get<bool>();
            r.expert_attempts = q.at("expert_attempts").get<int>();
            r.n_samples = q.at("n_samples").get<std::uint64_t>();
            r.expert_cost = q.at("expert_cost").get<double>();
            r.path_length = q.at("path_length").get<std::size_t>();
            m.queries.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ParseError(dataset_meta_path(path).string() + ": " + e.what());
    }
    if (ds.meta.sample_count != ds.samples.size())
        throw ParseError(path.string() + ": metadata sample count disagrees with the record file");
    return ds;
}

std::string dataset_to_csv(const Dataset& ds) {
    std::string out;
    const std::size_t dim = ds.samples.empty() ? 0 : ds.samples.front().current.dim();
    out += "query_id,query_non_trivial,prune_checked";
    for (const char* part : {"current", "goal", "next"})
        for (std::size_t i = 0; i < dim; ++i) out += fmt::format(",{}_{}", part, i);
    out += '\n';
    for (const auto& s : ds.samples) {
        out += fmt::format("{},{},{}", s.query_id, s.query_non_trivial ? 1 : 0, s.prune_checked ? 1 : 0);
        for (const auto* c : {&s.current, &s.goal, &s.next})
            for (double v : c->values()) out += fmt::format(",{}", v);
        out += '\n';
    }
    return out;
}

} // namespace ntqs
