#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hdrc/envelope.hpp"
#include "hdrc/fading.hpp"
#include "hdrc/oracle.hpp"

using namespace hdrc;
using Catch::Approx;

namespace {
double uni(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit_uniform(rng);
}

void check_geometry_invariants(const EnvelopeGeometry& g) {
    REQUIRE_FALSE(g.degenerate);
    const double f2 = df_saturation_limit(g.s1, g.t);
    CHECK(g.s_d > 0.0);
    CHECK(g.s_d <= f2 + 1e-12);
    CHECK(g.s_c > f2);
    CHECK(g.k > 0.0);
    // secant condition
    const double secant = (g.rate_at_sc - g.rate_at_sd) / (g.s_c - g.s_d);
    CHECK(secant == Approx(g.k).epsilon(1e-9));
    // tangency: CF side exact, DF side within the one-sided interval
    CHECK(rate_cf_slope({g.s1, g.t, g.s_c}) == Approx(g.k).margin(1e-8));
    const double d_left = rate_df_slope({g.s1, g.t, g.s_d}, Side::left);
    const double d_right = rate_df_slope({g.s1, g.t, g.s_d}, Side::right);
    CHECK(d_right <= g.k * (1.0 + 1e-8) + 1e-12);
    CHECK(d_left >= g.k * (1.0 - 1e-8) - 1e-12);
}
}  // namespace

TEST_CASE("degenerate envelope for t <= 1") {
    const EnvelopeGeometry g = build_envelope(1.0, 0.5);
    CHECK(g.degenerate);
    for (double s2 : {0.0, 0.5, 2.0, 10.0}) {
        CHECK(envelope_rate(s2, g) == rate_cf({1.0, 0.5, s2}));
        CHECK(rate_cf({1.0, 0.5, s2}) >= rate_df({1.0, 0.5, s2}) - 1e-12);
    }
    CHECK(build_envelope(0.0, 5.0).degenerate);
}

TEST_CASE("envelope geometry at (1, 4) matches the hull oracle") {
    const EnvelopeGeometry g = build_envelope(1.0, 4.0);
    check_geometry_invariants(g);
    CHECK(g.s_d <= 3.0 + 1e-12);

    oracle::GridSpec spec{50.0 * *df_cf_crossover(1.0, 4.0), 100000,
                          oracle::GridSpec::Spacing::logarithmic};
    const auto hull = oracle::hull_oracle(1.0, 4.0, spec);
    REQUIRE(hull.bridge.found);
    CHECK(hull.bridge.s_d == Approx(g.s_d).epsilon(1e-3));
    CHECK(hull.bridge.s_c == Approx(g.s_c).epsilon(1e-3));
    CHECK(hull.bridge.slope == Approx(g.k).epsilon(1e-3));
}

TEST_CASE("envelope geometry at (2, 6)") {
    check_geometry_invariants(build_envelope(2.0, 6.0));
}

TEST_CASE("envelope evaluation is piecewise") {
    const EnvelopeGeometry g = build_envelope(1.0, 4.0);
    CHECK(envelope_rate(g.s_d, g) == rate_df({1.0, 4.0, g.s_d}));
    CHECK(envelope_rate(2.0 * g.s_c, g) == rate_cf({1.0, 4.0, 2.0 * g.s_c}));
    const double mid = 0.5 * (g.s_d + g.s_c);
    CHECK(envelope_rate(mid, g) == Approx(g.rate_at_sd + g.k * (mid - g.s_d)));
    CHECK(envelope_rate(mid, g) > rate_hybrid({1.0, 4.0, mid}) + 1e-6);
}

TEST_CASE("envelope slope is piecewise and nonincreasing") {
    const EnvelopeGeometry g = build_envelope(1.0, 4.0);
    const double mid = 0.5 * (g.s_d + g.s_c);
    CHECK(envelope_slope(mid, g, Side::left) == g.k);
    CHECK(envelope_slope(2.0 * g.s_c, g, Side::right) ==
          rate_cf_slope({1.0, 4.0, 2.0 * g.s_c}));
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 400; ++i) {
        const double s2 = 2.0 * g.s_c * i / 400.0;
        const double d = envelope_slope(s2, g, Side::right);
        CHECK(d <= prev * (1.0 + 1e-9) + 1e-12);
        prev = d;
    }
}

TEST_CASE("envelope dominates the hybrid rate and is concave") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const double s1 = uni(rng, 0.05, 10.0), t = uni(rng, 1.05, 10.0);
        const EnvelopeGeometry g = build_envelope(s1, t);
        check_geometry_invariants(g);
        const double span = 3.0 * g.s_c;
        const int n = 400;
        std::vector<double> env(n);
        for (int i = 0; i < n; ++i) {
            const double s2 = span * i / (n - 1);
            env[i] = envelope_rate(s2, g);
            CHECK(env[i] >= rate_hybrid({s1, t, s2}) - 1e-12);
        }
        for (int i = 1; i + 1 < n; ++i)
            CHECK(env[i] >= 0.5 * (env[i - 1] + env[i + 1]) - 1e-12);
    }
}

TEST_CASE("inverse envelope slope honors the least-power tie break") {
    const EnvelopeGeometry g = build_envelope(1.0, 4.0);
    CHECK(inv_slope_envelope(g.k, g) == g.s_d);
    const double just_below_sd = inv_slope_envelope(g.k * (1.0 + 1e-6), g);
    CHECK(just_below_sd < g.s_d);
    CHECK(just_below_sd == Approx(g.s_d).epsilon(1e-3));
    const double just_above_sc = inv_slope_envelope(g.k * (1.0 - 1e-6), g);
    CHECK(just_above_sc > g.s_c);
    CHECK(just_above_sc == Approx(g.s_c).epsilon(1e-3));

    // steep slope: tiny s2 from the coherent branch
    const double steep = rate_df_slope({1.0, 4.0, 1e-4}, Side::right);
    const double small = inv_slope_envelope(steep, g);
    CHECK(small == Approx(1e-4).epsilon(1e-6));
    CHECK(envelope_slope(small, g, Side::right) == Approx(steep).epsilon(1e-8));

    CHECK_THROWS_AS(inv_slope_envelope(0.0, g), unbounded_error);
}

TEST_CASE("inverse envelope slope never lands inside the bridge") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 5; ++trial) {
        const double s1 = uni(rng, 0.05, 10.0), t = uni(rng, 1.05, 10.0);
        const EnvelopeGeometry g = build_envelope(s1, t);
        const double top = rate_df_slope({s1, t, 1e-6}, Side::right);
        for (int i = 0; i < 1000; ++i) {
            const double nu =
                g.k * 1e-3 * std::pow(top / (g.k * 1e-3), i / 999.0);
            const double s2 = inv_slope_envelope(nu, g);
            const bool inside = s2 > g.s_d * (1.0 + 1e-9) && s2 < g.s_c * (1.0 - 1e-9);
            CHECK_FALSE(inside);
        }
    }
}
