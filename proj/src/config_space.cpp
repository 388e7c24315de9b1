#include "ntqs/config_space.hpp"

#include "ntqs/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ntqs {

double wrap_angle(double a) noexcept {
    // Differences of wrapped angles land here; the single shift is exact (Sterbenz).
    if (a > -kPi && a <= kPi) return a;
    if (a > kPi && a <= 3.0 * kPi) return a - 2.0 * kPi;
    if (a > -3.0 * kPi && a <= -kPi) return a + 2.0 * kPi;
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    if (r > kPi) r -= 2.0 * kPi;
    return r;
}

std::string_view to_string(ConfigKind kind) noexcept {
    switch (kind) {
    case ConfigKind::Point2: return "point2";
    case ConfigKind::PoseSE2: return "pose_se2";
    case ConfigKind::Joints: return "joints";
    }
    return "unknown";
}

Configuration Configuration::point(double x, double y) {
    Configuration c;
    c.kind_ = ConfigKind::Point2;
    c.dim_ = 2;
    c.v_[0] = x;
    c.v_[1] = y;
    return c;
}

Configuration Configuration::pose(double x, double y, double theta) {
    Configuration c;
    c.kind_ = ConfigKind::PoseSE2;
    c.dim_ = 3;
    c.v_[0] = x;
    c.v_[1] = y;
    c.v_[2] = wrap_angle(theta);
    return c;
}

Configuration Configuration::joints(std::span<const double> angles) {
    if (angles.empty() || angles.size() > kMaxDim)
        throw DimensionError(fmt::format("joint vector must have 1..{} entries, got {}", kMaxDim, angles.size()));
    Configuration c;
    c.kind_ = ConfigKind::Joints;
    c.dim_ = static_cast<std::uint8_t>(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) c.v_[i] = wrap_angle(angles[i]);
    return c;
}

Configuration Configuration::from_values(ConfigKind kind, std::span<const double> values) {
    switch (kind) {
    case ConfigKind::Point2:
        if (values.size() != 2) throw DimensionError(fmt::format("point2 needs 2 values, got {}", values.size()));
        return point(values[0], values[1]);
    case ConfigKind::PoseSE2:
        if (values.size() != 3) throw DimensionError(fmt::format("pose_se2 needs 3 values, got {}", values.size()));
        return pose(values[0], values[1], values[2]);
    case ConfigKind::Joints: return joints(values);
    }
    throw DimensionError("unknown configuration kind");
}

bool operator==(const Configuration& a, const Configuration& b) noexcept {
    if (!a.same_space(b)) return false;
    return std::equal(a.v_.begin(), a.v_.begin() + a.dim_, b.v_.begin());
}

bool lex_less(const Configuration& a, const Configuration& b) noexcept {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    if (a.dim_ != b.dim_) return a.dim_ < b.dim_;
    return std::lexicographical_compare(a.v_.begin(), a.v_.begin() + a.dim_, b.v_.begin(), b.v_.begin() + b.dim_);
}

std::string Configuration::to_string() const {
    return fmt::format("{}({})", ntqs::to_string(kind_), fmt::join(values(), ", "));
}

namespace {

void require_same_space(const Configuration& a, const Configuration& b) {
    if (!a.same_space(b))
        throw DimensionError(fmt::format("configuration mismatch: {}[{}] vs {}[{}]", to_string(a.kind()), a.dim(),
                                         to_string(b.kind()), b.dim()));
}

} // namespace

double config_distance(const Configuration& a, const Configuration& b, double w_theta) {
    require_same_space(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double d = b[i] - a[i];
        if (a.is_angular(i)) {
            d = wrap_angle(d);
            if (a.kind() == ConfigKind::PoseSE2) d *= w_theta;
        }
        sum += d * d;
    }
    return std::sqrt(sum);
}

Configuration interpolate(const Configuration& a, const Configuration& b, double t) {
    require_same_space(a, b);
    if (!(t >= 0.0 && t <= 1.0)) throw InputError(fmt::format("interpolation parameter {} outside [0, 1]", t));
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    std::array<double, Configuration::kMaxDim> v{};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a.is_angular(i))
            v[i] = a[i] + t * wrap_angle(b[i] - a[i]);
        else
            v[i] = a[i] + t * (b[i] - a[i]);
    }
    return Configuration::from_values(a.kind(), std::span<const double>(v.data(), a.dim()));
}

} // namespace ntqs
