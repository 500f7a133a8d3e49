#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hdrc/oracle.hpp"
#include "hdrc/rates.hpp"

using namespace hdrc;
using Catch::Approx;

TEST_CASE("upper hull of a concave function keeps every sample") {
    oracle::GridSpec spec{20.0, 200, oracle::GridSpec::Spacing::linear};
    const auto xs = oracle::grid_points(spec);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = rate_cf({1.0, 4.0, xs[i]});
    const auto hull = oracle::upper_hull_indices(xs, ys);
    CHECK(hull.size() == xs.size());  // strictly concave: every point is a vertex
}

TEST_CASE("hull is idempotent") {
    oracle::GridSpec spec{50.0 * 18.0, 5000, oracle::GridSpec::Spacing::logarithmic};
    auto res = oracle::hull_oracle(1.0, 4.0, spec);
    std::vector<double> hx, hy;
    for (const auto i : res.hull) {
        hx.push_back(res.xs[i]);
        hy.push_back(res.ys[i]);
    }
    const auto again = oracle::upper_hull_indices(hx, hy);
    CHECK(again.size() == hx.size());
}

TEST_CASE("three-point hull by hand") {
    const std::vector<double> xs{0.0, 1.0, 2.0};
    SECTION("middle above the chord") {
        const auto hull = oracle::upper_hull_indices(xs, {0.0, 1.0, 0.0});
        REQUIRE(hull.size() == 3);
    }
    SECTION("middle below the chord") {
        const auto hull = oracle::upper_hull_indices(xs, {0.0, -1.0, 0.0});
        REQUIRE(hull.size() == 2);
        CHECK(hull[0] == 0);
        CHECK(hull[1] == 2);
    }
}

TEST_CASE("hull oracle flags a bridge only when one exists") {
    oracle::GridSpec spec{100.0, 20000, oracle::GridSpec::Spacing::logarithmic};
    CHECK(oracle::hull_oracle(1.0, 0.5, spec).bridge.warn);  // concave: nothing to find
    CHECK(oracle::hull_oracle(1.0, 4.0,
                              {50.0 * 18.0, 20000, oracle::GridSpec::Spacing::logarithmic})
              .bridge.found);
}

TEST_CASE("df rate oracle agrees with the closed form") {
    CHECK(oracle::df_rate_oracle(1.0, 4.0, 1.0, 1000000) ==
          Approx(rate_df({1.0, 4.0, 1.0})).margin(2e-6));
    CHECK(oracle::df_rate_oracle(1.0, 4.0, 0.0, 1000) ==
          Approx(rate_df({1.0, 4.0, 0.0})).margin(1e-12));
    CHECK(oracle::df_rate_oracle(1.0, 4.0, 50.0, 100000) ==
          Approx(0.5 * shannon(1.0) + 0.5 * shannon(4.0)).margin(2e-6));
    CHECK(oracle::df_rate_oracle(0.3, 7.0, 0.02, 1000000) ==
          Approx(rate_df({0.3, 7.0, 0.02})).margin(2e-6));
}

TEST_CASE("fd derivative of shannon at 1") {
    CHECK(oracle::fd_derivative([](double x) { return shannon(x); }, 1.0, 1e-6, Side::right) ==
          Approx(1.0 / (2.0 * kLn2)).epsilon(1e-8));
    CHECK(oracle::fd_derivative([](double x) { return shannon(x); }, 1.0, 1e-6, Side::left) ==
          Approx(1.0 / (2.0 * kLn2)).epsilon(1e-8));
}

TEST_CASE("discrete allocation oracle pins the single-state budget") {
    const std::vector<oracle::OracleFadingState> states{{1.0, 2.0, 1.0, 1.0}};
    const double p2_bar = 0.7;
    const auto res = oracle::discrete_allocation_oracle(
        states, 1.0, p2_bar, [](const SnrState& st) { return rate_cf(st); }, 2000);
    // one state, increasing rate: spend everything
    CHECK(res.s2[0] == Approx(2.0 * p2_bar).epsilon(1e-3));
    CHECK(res.used_power <= p2_bar * (1.0 + 1e-12));
    CHECK(res.used_power == Approx(p2_bar).epsilon(1e-3));
    CHECK(res.avg_rate == Approx(rate_cf({1.0, 4.0, 2.0 * p2_bar})).margin(1e-5));
}

TEST_CASE("discrete allocation oracle respects its own budget") {
    const std::vector<oracle::OracleFadingState> states{
        {1.0, 2.0, 0.8, 0.5}, {0.6, 1.5, 1.3, 0.3}, {1.4, 0.9, 0.5, 0.2}};
    const auto res = oracle::discrete_allocation_oracle(
        states, 1.0, 0.9, [](const SnrState& st) { return rate_hybrid(st); }, 2000);
    CHECK(res.used_power <= 0.9 * (1.0 + 1e-12));
    CHECK(res.avg_rate > 0.0);
    for (double s2 : res.s2) CHECK(s2 >= 0.0);
}
