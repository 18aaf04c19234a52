#include <random>

#include "doctest.h"
#include "molcf/calibrate.hpp"
#include "oracles.hpp"

using namespace molcf;

TEST_CASE("monotone input passes through unchanged") {
    IsotonicMap map = fit_isotonic({{1, 1}, {2, 2}, {3, 3}});
    CHECK(map.values == std::vector<double>{1, 2, 3});
    CHECK(map.breakpoints == std::vector<double>{1, 2, 3});
    CHECK_FALSE(map.constant_fallback);
}

TEST_CASE("violators are pooled") {
    // raw-sorted errors [3, 1, 2]: pool (3,1) -> 2, then (2,2,2) is monotone
    IsotonicMap map = fit_isotonic({{1, 3}, {2, 1}, {3, 2}});
    REQUIRE(map.values.size() == 3);
    CHECK(map.values[0] == doctest::Approx(2.0));
    CHECK(map.values[1] == doctest::Approx(2.0));
    CHECK(map.values[2] == doctest::Approx(2.0));
}

TEST_CASE("ties in the raw value are pre-averaged") {
    IsotonicMap map = fit_isotonic({{1, 1}, {1, 3}});
    CHECK(map.constant_fallback);
    REQUIRE(map.values.size() == 1);
    CHECK(map.values[0] == doctest::Approx(2.0));
    CHECK(apply(map, 0.5) == doctest::Approx(2.0));
    CHECK(apply(map, 7.0) == doctest::Approx(2.0));
}

TEST_CASE("apply clamps and interpolates") {
    IsotonicMap map = fit_isotonic({{1, 1}, {3, 3}});
    CHECK(apply(map, 0.0) == doctest::Approx(1.0));   // below range
    CHECK(apply(map, 1.0) == doctest::Approx(1.0));   // at a breakpoint
    CHECK(apply(map, 3.0) == doctest::Approx(3.0));
    CHECK(apply(map, 9.0) == doctest::Approx(3.0));   // above range
    CHECK(apply(map, 2.0) == doctest::Approx(2.0));   // midpoint of values 1 and 3
}

TEST_CASE("inputs are validated") {
    CHECK_THROWS(fit_isotonic({{1, 1}}));
    CHECK_THROWS(fit_isotonic({{1, -1}, {2, 2}}));
}

TEST_CASE("applied map is non-decreasing everywhere") {
    std::mt19937_64 rng(64);
    std::uniform_real_distribution<double> ux(0, 10), ue(0, 5);
    for (int t = 0; t < 30; ++t) {
        std::vector<std::pair<double, double>> pairs;
        int n = 2 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) pairs.emplace_back(ux(rng), ue(rng));
        IsotonicMap map = fit_isotonic(pairs);
        for (std::size_t k = 1; k < map.values.size(); ++k)
            CHECK(map.values[k] >= map.values[k - 1]);
        double prev = -1e300;
        for (double x = -1.0; x <= 11.0; x += 0.25) {
            double v = apply(map, x);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("pava matches the exhaustive monotone least-squares oracle") {
    std::mt19937_64 rng(128);
    std::uniform_real_distribution<double> ue(0, 4);
    for (int t = 0; t < 60; ++t) {
        int n = 2 + static_cast<int>(rng() % 5);
        std::vector<std::pair<double, double>> pairs;
        for (int i = 0; i < n; ++i) pairs.emplace_back(i, ue(rng));   // distinct raw values
        IsotonicMap map = fit_isotonic(pairs);

        std::vector<double> ys, ws(n, 1.0);
        for (const auto& [x, e] : pairs) ys.push_back(e);
        auto oracle = testoracle::exhaustive_monotone_lsq(ys, ws);
        REQUIRE(oracle.has_value());
        for (int i = 0; i < n; ++i) CHECK(map.values[i] == doctest::Approx((*oracle)[i]).epsilon(1e-9));
    }
}

TEST_CASE("isotonic map serializes") {
    IsotonicMap map = fit_isotonic({{0.5, 2}, {1.5, 1}, {2.5, 4}});
    IsotonicMap back = IsotonicMap::from_text(map.to_text());
    CHECK(back.breakpoints == map.breakpoints);
    CHECK(back.values == map.values);
    CHECK(back.constant_fallback == map.constant_fallback);
}
