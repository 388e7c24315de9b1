#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

namespace ntqs {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a) noexcept;

enum class ConfigKind : std::uint8_t { Point2 = 0, PoseSE2 = 1, Joints = 2 };

std::string_view to_string(ConfigKind kind) noexcept;

/// A robot state: plane position, SE(2) pose or joint vector.
///
/// Storage is inline (at most kMaxDim values) since the planners create and
/// discard configurations in tight loops. Angular coordinates (the pose
/// heading, every joint) are kept wrapped to (-pi, pi].
class Configuration {
public:
    static constexpr std::size_t kMaxDim = 8;

    Configuration() = default;

    static Configuration point(double x, double y);
    static Configuration pose(double x, double y, double theta);
    static Configuration joints(std::span<const double> angles);
    /// Builds a configuration of `kind` from raw values, wrapping angular ones.
    static Configuration from_values(ConfigKind kind, std::span<const double> values);

    ConfigKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }
    double operator[](std::size_t i) const noexcept { return v_[i]; }
    std::span<const double> values() const noexcept { return {v_.data(), dim_}; }

    bool is_angular(std::size_t i) const noexcept {
        return kind_ == ConfigKind::Joints || (kind_ == ConfigKind::PoseSE2 && i == 2);
    }

    bool same_space(const Configuration& o) const noexcept { return kind_ == o.kind_ && dim_ == o.dim_; }

    friend bool operator==(const Configuration& a, const Configuration& b) noexcept;

    /// Strict lexicographic order on (kind, dim, values); only used to
    /// canonicalize the direction of symmetric operations.
    friend bool lex_less(const Configuration& a, const Configuration& b) noexcept;

    std::string to_string() const;

private:
    ConfigKind kind_ = ConfigKind::Point2;
    std::uint8_t dim_ = 0;
    std::array<double, kMaxDim> v_{};
};

/// Configuration-space metric. Point2: Euclidean. PoseSE2: translation plus
/// `w_theta` times the shortest heading arc. Joints: Euclidean over wrapped
/// per-joint differences. Throws DimensionError on mismatched spaces.
double config_distance(const Configuration& a, const Configuration& b, double w_theta = 1.0);

/// Straight-line interpolation; angular coordinates follow the shortest arc.
/// t = 0 and t = 1 return the endpoints exactly.
Configuration interpolate(const Configuration& a, const Configuration& b, double t);

} // namespace ntqs
