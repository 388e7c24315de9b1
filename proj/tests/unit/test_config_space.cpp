#include "support.hpp"

#include <doctest.h>

using namespace ntqs;

TEST_SUITE("config_space") {

TEST_CASE("distance examples") {
    CHECK(config_distance(Configuration::point(0, 0), Configuration::point(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));
    const double w = 0.7;
    CHECK(config_distance(Configuration::pose(0, 0, kPi - 0.1), Configuration::pose(0, 0, -kPi + 0.1), w) ==
          doctest::Approx(w * 0.2).epsilon(1e-12));
    const double z[2] = {0.0, 0.0};
    CHECK(config_distance(Configuration::joints(z), Configuration::joints(z)) == 0.0);
}

TEST_CASE("distance rejects mismatched spaces") {
    const double one[1] = {0.0};
    const double two[2] = {0.0, 0.0};
    CHECK_THROWS_AS(config_distance(Configuration::point(0, 0), Configuration::pose(0, 0, 0)), DimensionError);
    CHECK_THROWS_AS(config_distance(Configuration::joints(one), Configuration::joints(two)), DimensionError);
}

TEST_CASE("metric properties on random pairs") {
    Rng rng(11);
    auto random_config = [&](int kind) {
        if (kind == 0) return Configuration::point(rng.uniform(-5, 5), rng.uniform(-5, 5));
        if (kind == 1) return Configuration::pose(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-kPi, kPi));
        double v[4];
        for (double& x : v) x = rng.uniform(-kPi, kPi);
        return Configuration::joints(v);
    };
    for (int kind = 0; kind < 3; ++kind) {
        for (int i = 0; i < 2000; ++i) {
            const auto a = random_config(kind), b = random_config(kind), c = random_config(kind);
            const double ab = config_distance(a, b, 1.3), ba = config_distance(b, a, 1.3);
            CHECK(ab == ba);
            CHECK(ab >= 0.0);
            CHECK(config_distance(a, a, 1.3) == 0.0);
            CHECK(config_distance(a, c, 1.3) <= ab + config_distance(b, c, 1.3) + 1e-12);
        }
    }
}

TEST_CASE("wrap_angle range and identity") {
    CHECK(wrap_angle(kPi) == kPi);
    CHECK(wrap_angle(-kPi) == kPi);
    CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(0.25) == 0.25);
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.uniform(-50, 50);
        const double w = wrap_angle(a);
        CHECK(w > -kPi);
        CHECK(w <= kPi);
        // Same direction on the circle.
        CHECK(std::cos(w) == doctest::Approx(std::cos(a)).epsilon(1e-9));
        CHECK(std::sin(w) == doctest::Approx(std::sin(a)).epsilon(1e-9));
    }
}

TEST_CASE("factories wrap angles") {
    const auto p = Configuration::pose(1, 2, 3 * kPi / 2);
    CHECK(p[2] == doctest::Approx(-kPi / 2));
    const double j[2] = {-kPi, 7.0};
    const auto q = Configuration::joints(j);
    CHECK(q[0] == kPi);
    CHECK(q[1] == doctest::Approx(7.0 - 2 * kPi));
}

TEST_CASE("interpolate examples") {
    const auto mid = interpolate(Configuration::point(0, 0), Configuration::point(10, 0), 0.5);
    CHECK(mid == Configuration::point(5, 0));

    const auto seam = interpolate(Configuration::pose(0, 0, kPi - 0.1), Configuration::pose(0, 0, -kPi + 0.1), 0.5);
    CHECK(std::abs(std::abs(seam[2]) - kPi) < 1e-12);

    const double a[1] = {0.0};
    const double b[1] = {kPi / 2};
    CHECK(interpolate(Configuration::joints(a), Configuration::joints(b), 1.0) == Configuration::joints(b));
}

TEST_CASE("interpolate endpoints, range and monotonicity") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto a = Configuration::pose(rng.uniform(0, 9), rng.uniform(0, 9), rng.uniform(-kPi, kPi));
        const auto b = Configuration::pose(rng.uniform(0, 9), rng.uniform(0, 9), rng.uniform(-kPi, kPi));
        CHECK(interpolate(a, b, 0.0) == a);
        CHECK(interpolate(a, b, 1.0) == b);
        const auto p = Configuration::point(rng.uniform(0, 9), rng.uniform(0, 9));
        const auto q = Configuration::point(rng.uniform(0, 9), rng.uniform(0, 9));
        double last = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double d = config_distance(interpolate(p, q, k / 20.0), p);
            CHECK(d >= last - 1e-12);
            last = d;
        }
    }
    CHECK_THROWS_AS(interpolate(Configuration::point(0, 0), Configuration::point(1, 1), 1.5), InputError);
    CHECK_THROWS_AS(interpolate(Configuration::point(0, 0), Configuration::point(1, 1), -0.1), InputError);
    CHECK_THROWS_AS(interpolate(Configuration::point(0, 0), Configuration::pose(1, 1, 0), 0.5), DimensionError);
}

TEST_CASE("heading interpolation follows the shortest arc") {
    const auto a = Configuration::pose(0, 0, 3.0);
    const auto b = Configuration::pose(0, 0, -3.0);
    for (int k = 0; k <= 10; ++k) {
        const auto c = interpolate(a, b, k / 10.0);
        CHECK(std::abs(c[2]) >= 3.0 - 1e-12);  // never sweeps through zero
    }
}

}
