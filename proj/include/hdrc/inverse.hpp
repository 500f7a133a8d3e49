#pragma once

// Inverse slope maps: the s2 at which a protocol's marginal rate equals a
// target slope nu. These are the per-state building blocks of the dual
// power-allocation solutions.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "hdrc/bisect.hpp"
#include "hdrc/errors.hpp"
#include "hdrc/rates.hpp"

namespace hdrc {

/// Inverse of the CF slope. Clamps to 0 when nu is at or above the slope
/// at s2 = 0; otherwise the positive root of the quadratic obtained from
/// g_c'(s2) = 2 g_c(s2) nu ln2. nu = 0 has no finite answer (the CF rate
/// never saturates).
inline double inv_slope_cf(double nu, double s1, double t) {
    if (!std::isfinite(nu) || nu < 0.0)
        throw std::domain_error("inv_slope_cf: slope must be finite and nonnegative");
    if (nu == 0.0) throw unbounded_error("inv_slope_cf: zero slope, CF rate never saturates");
    if (nu >= rate_cf_slope({s1, t, 0.0})) return 0.0;

    const double a0 = 1.0 + (t + 1.0) * s1;  // A
    const double a = 1.0 + s1 + t * s1;
    const double b = a0 * (2.0 * (1.0 + s1) + t * s1);
    const double c = (1.0 + s1) * a0 * a0 - t * s1 * a0 / (2.0 * nu * kLn2);
    // nu below the s2=0 slope makes c < 0, so the roots straddle zero;
    // -2c/(b+D) is the positive one, written without cancellation.
    const double d = std::sqrt(b * b - 4.0 * a * c);
    const double root = -2.0 * c / (b + d);
    if (!(root > 0.0)) throw std::logic_error("inv_slope_cf: nonpositive root");
    return root;
}

/// Inverse of the DF slope, honoring the one-sided derivative jump at the
/// coherent threshold: slopes inside the jump interval map to f1 itself.
/// nu = 0 returns the saturation threshold (the least s2 achieving the
/// saturated rate); t <= 1 returns 0 for the same reason.
inline double inv_slope_df(double nu, double s1, double t) {
    if (!std::isfinite(nu) || nu < 0.0)
        throw std::domain_error("inv_slope_df: slope must be finite and nonnegative");
    if (!(t > 1.0) || !(s1 > 0.0)) return 0.0;
    const double f2 = df_saturation_limit(s1, t);
    if (nu == 0.0) return f2;

    const auto slope_at = [&](double s2, Side side) {
        return rate_df_slope({s1, t, s2}, side);
    };

    double lo, hi;
    const auto f1 = df_coherent_limit(s1, t);
    if (f1) {
        const double d_left = slope_at(*f1, Side::left);
        const double d_right = slope_at(*f1, Side::right);
        if (nu >= d_right && nu <= d_left) return *f1;
        if (nu > d_left) {
            // coherent branch on (0, f1); the slope diverges at 0+
            hi = *f1;
            lo = 0.5 * *f1;
            for (int i = 0; i < 1100 && slope_at(lo, Side::left) < nu; ++i) lo *= 0.5;
            const auto g = [&](double s2) { return slope_at(s2, Side::left) - nu; };
            return bisect_decreasing(g, lo, hi).x;
        }
        lo = *f1;
        hi = f2;
    } else {
        // no coherent branch: the correlated slope spans (0, inf) on (0, f2)
        hi = f2;
        lo = 0.5 * f2;
        for (int i = 0; i < 1100 && slope_at(lo, Side::right) < nu; ++i) lo *= 0.5;
    }
    const auto g = [&](double s2) { return slope_at(s2, Side::right) - nu; };
    return bisect_decreasing(g, lo, hi).x;
}

}  // namespace hdrc
