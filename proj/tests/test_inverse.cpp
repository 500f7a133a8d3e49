#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hdrc/fading.hpp"
#include "hdrc/inverse.hpp"
#include "hdrc/oracle.hpp"
#include "hdrc/rates.hpp"

using namespace hdrc;
using Catch::Approx;

namespace {
double uni(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit_uniform(rng);
}
double log_uni(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(uni(rng, std::log(lo), std::log(hi)));
}
}  // namespace

TEST_CASE("inv_slope_cf clamps and round-trips") {
    const double d0 = rate_cf_slope({1.0, 4.0, 0.0});
    CHECK(inv_slope_cf(d0, 1.0, 4.0) == 0.0);
    CHECK(inv_slope_cf(2.0 * d0, 1.0, 4.0) == 0.0);
    CHECK(inv_slope_cf(rate_cf_slope({1.0, 4.0, 6.0}), 1.0, 4.0) == Approx(6.0).epsilon(1e-12));
    CHECK_THROWS_AS(inv_slope_cf(0.0, 1.0, 4.0), unbounded_error);
    CHECK_THROWS_AS(inv_slope_cf(-1.0, 1.0, 4.0), std::domain_error);
}

TEST_CASE("inv_slope_df saturation and kink handling") {
    CHECK(inv_slope_df(0.0, 1.0, 4.0) == Approx(3.0).epsilon(1e-12));
    CHECK(inv_slope_df(0.5, 1.0, 0.9) == 0.0);  // t <= 1: saturated at zero power

    const double f1 = *df_coherent_limit(1.0, 4.0);
    const double d_left = rate_df_slope({1.0, 4.0, f1}, Side::left);
    const double d_right = rate_df_slope({1.0, 4.0, f1}, Side::right);
    const double nu_gap = 0.5 * (d_left + d_right);
    CHECK(inv_slope_df(nu_gap, 1.0, 4.0) == Approx(f1).epsilon(1e-12));
    CHECK(inv_slope_df(d_right, 1.0, 4.0) == Approx(f1).epsilon(1e-12));
    CHECK(inv_slope_df(d_left, 1.0, 4.0) == Approx(f1).epsilon(1e-12));

    const double nu = rate_df_slope({1.0, 4.0, 1.0}, Side::right);
    CHECK(inv_slope_df(nu, 1.0, 4.0) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("branch thresholds written out agree with the one-sided slopes") {
    // The two slope bounds at the kink, spelled out directly, against the
    // slope function and against finite differences; any mismatch would
    // flag a broken derivative display.
    std::mt19937_64 rng(163);
    for (int trial = 0; trial < 25; ++trial) {
        const double s1 = uni(rng, 0.05, 5.0);
        const double t = uni(rng, s1 + 2.0 + 0.1, s1 + 2.0 + 8.0);
        const auto f1 = df_coherent_limit(s1, t);
        if (!f1) continue;
        const double denom =
            2.0 * (1.0 + std::pow(std::sqrt(s1) + std::sqrt(*f1), 2.0)) * kLn2;
        const double upper = (std::sqrt(s1 / *f1) + 1.0) / denom;
        const double lower = df_gain_slope(s1, t, *f1) / denom;
        CHECK(rate_df_slope({s1, t, *f1}, Side::left) == Approx(upper).epsilon(1e-12));
        CHECK(rate_df_slope({s1, t, *f1}, Side::right) == Approx(lower).epsilon(1e-12));
        CHECK(lower < upper);
        const auto df_at = [&](double x) { return rate_df({s1, t, x}); };
        CHECK(oracle::fd_derivative(df_at, *f1, 1e-7, Side::left) ==
              Approx(upper).epsilon(1e-4));
        CHECK(oracle::fd_derivative(df_at, *f1, 1e-7, Side::right) ==
              Approx(lower).epsilon(1e-4));
    }
}

TEST_CASE("inverse results satisfy the one-sided slope sandwich") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const double s1 = uni(rng, 0.05, 10.0), t = uni(rng, 1.05, 10.0);
        const double d_top = rate_df_slope({s1, t, 1e-6}, Side::right);
        const double nu = log_uni(rng, 1e-6 * d_top, 0.999 * d_top);
        const double s2 = inv_slope_df(nu, s1, t);
        CHECK(s2 >= 0.0);
        CHECK(s2 <= df_saturation_limit(s1, t) + 1e-12);
        const double left = (s2 > 0.0) ? rate_df_slope({s1, t, s2}, Side::left)
                                       : std::numeric_limits<double>::infinity();
        const double right = rate_df_slope({s1, t, s2}, Side::right);
        CHECK(left >= nu * (1.0 - 1e-9) - 1e-15);
        CHECK(right <= nu * (1.0 + 1e-9) + 1e-15);
    }
}

TEST_CASE("round trip d(T(nu)) = nu away from the kink") {
    std::mt19937_64 rng(29);
    int df_done = 0, cf_done = 0;
    while (df_done < 300 || cf_done < 300) {
        const double s1 = uni(rng, 0.05, 10.0), t = uni(rng, 1.05, 10.0);
        if (cf_done < 300) {
            const double d0 = rate_cf_slope({s1, t, 0.0});
            const double nu = log_uni(rng, 1e-4 * d0, 0.999 * d0);
            const double s2 = inv_slope_cf(nu, s1, t);
            CHECK(rate_cf_slope({s1, t, s2}) == Approx(nu).epsilon(1e-8));
            ++cf_done;
        }
        if (df_done < 300) {
            const auto f1 = df_coherent_limit(s1, t);
            const double d_hi = rate_df_slope({s1, t, 1e-5}, Side::right);
            const double nu = log_uni(rng, 1e-4 * d_hi, 0.999 * d_hi);
            if (f1) {
                const double d_left = rate_df_slope({s1, t, *f1}, Side::left);
                const double d_right = rate_df_slope({s1, t, *f1}, Side::right);
                // the jump interval maps to f1, where no round trip exists
                if (nu >= d_right * (1.0 - 1e-6) && nu <= d_left * (1.0 + 1e-6)) continue;
            }
            const double s2 = inv_slope_df(nu, s1, t);
            if (s2 <= 1e-12) continue;
            CHECK(rate_df_slope({s1, t, s2}, Side::right) == Approx(nu).epsilon(1e-8));
            ++df_done;
        }
    }
}

TEST_CASE("inverse maps are nonincreasing in nu") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const double s1 = uni(rng, 0.05, 10.0), t = uni(rng, 1.05, 10.0);
        const double d0 = rate_cf_slope({s1, t, 0.0});
        double prev_df = std::numeric_limits<double>::infinity();
        double prev_cf = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 40; ++i) {
            const double nu = 1e-5 * d0 * std::pow(10.0, 6.0 * i / 39.0);
            const double sdf = inv_slope_df(nu, s1, t);
            const double scf = inv_slope_cf(nu, s1, t);
            CHECK(sdf <= prev_df + 1e-9);
            CHECK(scf <= prev_cf + 1e-9);
            CHECK(scf >= 0.0);
            prev_df = sdf;
            prev_cf = scf;
        }
    }
}

TEST_CASE("bisection reaches 1e-10 within its iteration budget") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const double s1 = uni(rng, 0.05, 10.0), t = uni(rng, 1.05, 10.0);
        const double d_hi = rate_df_slope({s1, t, 1e-4}, Side::right);
        const double nu = log_uni(rng, 1e-3 * d_hi, 0.9 * d_hi);
        int iters = 0;
        const auto g = [&](double s2) {
            ++iters;
            return rate_df_slope({s1, t, s2}, Side::right) - nu;
        };
        double lo = 1e-4;
        while (rate_df_slope({s1, t, lo}, Side::right) < nu) lo *= 0.5;
        const auto res = bisect_decreasing(g, lo, df_saturation_limit(s1, t), 1e-10);
        CHECK(res.converged);
        CHECK(res.iterations <= 200);
    }
}
