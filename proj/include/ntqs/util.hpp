#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>

namespace ntqs {

inline constexpr std::string_view kToolVersion = "ntqs 1.0.0";

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `ids` under `base`. Order of ids matters.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids) noexcept {
    std::uint64_t s = mix64(base);
    for (auto id : ids) s = mix64(s ^ mix64(id + 0x632be59bd9b4e019ULL));
    return s;
}

/// Portable random stream. The engine is fully specified by the standard and
/// the real/integer mappings below avoid implementation-defined distributions,
/// so a seed reproduces the same draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t index(std::size_t n) {
        __extension__ using u128 = unsigned __int128;
        const u128 prod = static_cast<u128>(engine_()) * n;
        return static_cast<std::size_t>(prod >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary file and renames, so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Callers store results
/// by index so the outcome is independent of scheduling.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

/// Worker count used when a caller passes 0.
std::size_t default_jobs();

} // namespace ntqs
