#pragma once

// Concave envelope of the hybrid (best-of-DF/CF) rate for a fixed (s1, t).
//
// For t > 1 the hybrid rate has a convex kink where the saturated DF rate
// hands over to CF, so its envelope consists of the DF curve up to s_d, a
// bridge segment of slope k, and the CF curve from s_c on. The bridge is
// found by bisecting on the common tangent slope.

#include <cmath>
#include <stdexcept>

#include "hdrc/bisect.hpp"
#include "hdrc/errors.hpp"
#include "hdrc/inverse.hpp"
#include "hdrc/rates.hpp"

namespace hdrc {

/// Slope comparisons against the bridge slope k tie within this tolerance.
inline constexpr double kSlopeTieTol = 1e-12;

struct EnvelopeGeometry {
    double s1 = 0.0;
    double t = 0.0;
    bool degenerate = true;  // t <= 1: envelope coincides with the CF rate
    double s_d = 0.0;        // DF-side endpoint of the bridge
    double s_c = 0.0;        // CF-side endpoint of the bridge
    double k = 0.0;          // bridge slope
    double rate_at_sd = 0.0;
    double rate_at_sc = 0.0;
};

/// Build the envelope geometry. Degenerate for t <= 1 or s1 = 0 (the CF
/// rate already dominates). Throws no_bridge_error when no common tangent
/// slope can be bracketed, which would mean the hybrid rate is already
/// concave; it carries the bracket diagnostics.
inline EnvelopeGeometry build_envelope(double s1, double t) {
    if (!std::isfinite(s1) || s1 < 0.0 || !std::isfinite(t) || t < 0.0)
        throw std::domain_error("build_envelope: invalid (s1, t)");
    EnvelopeGeometry g;
    g.s1 = s1;
    g.t = t;
    if (!(t > 1.0) || !(s1 > 0.0)) return g;

    const auto gap = [&](double nu) {
        const double sd = inv_slope_df(nu, s1, t);
        const double sc = inv_slope_cf(nu, s1, t);
        return rate_cf({s1, t, sc}) - rate_df({s1, t, sd}) - nu * (sc - sd);
    };

    const double nu_max = rate_cf_slope({s1, t, 0.0});
    double nu_hi = nu_max * (1.0 - 1e-12);
    double nu_lo = 0.5 * nu_max;
    int halvings = 0;
    for (; halvings < 1100 && gap(nu_lo) <= 0.0; ++halvings) nu_lo *= 0.5;
    if (halvings == 1100 || gap(nu_hi) >= 0.0)
        throw no_bridge_error("build_envelope: no common tangent slope bracketed", nu_lo,
                              nu_hi, gap(nu_lo), gap(nu_hi));

    const double k = bisect_decreasing(gap, nu_lo, nu_hi).x;
    g.k = k;
    g.s_d = inv_slope_df(k, s1, t);
    g.s_c = inv_slope_cf(k, s1, t);
    if (!(g.s_c > g.s_d)) {
        // numerically crossed bridge: fall back to the CF rate
        g.degenerate = true;
        return g;
    }
    g.degenerate = false;
    g.rate_at_sd = rate_df({s1, t, g.s_d});
    g.rate_at_sc = rate_cf({s1, t, g.s_c});
    return g;
}

/// Envelope value: DF curve, bridge segment, or CF curve.
inline double envelope_rate(double s2, const EnvelopeGeometry& g) {
    if (g.degenerate) return rate_cf({g.s1, g.t, s2});
    if (s2 <= g.s_d) return rate_df({g.s1, g.t, s2});
    if (s2 >= g.s_c) return rate_cf({g.s1, g.t, s2});
    return g.rate_at_sd + g.k * (s2 - g.s_d);
}

/// One-sided envelope slope; equals k on the bridge and is nonincreasing
/// in s2 overall.
inline double envelope_slope(double s2, const EnvelopeGeometry& g, Side side) {
    if (g.degenerate) return rate_cf_slope({g.s1, g.t, s2});
    if (s2 < g.s_d || (s2 == g.s_d && side == Side::left))
        return rate_df_slope({g.s1, g.t, s2}, side);
    if (s2 > g.s_c || (s2 == g.s_c && side == Side::right))
        return rate_cf_slope({g.s1, g.t, s2});
    return g.k;
}

/// Inverse of the envelope slope with the least-power tie break: slopes
/// matching k map to s_d, never to the interior of the bridge. nu = 0 has
/// no finite answer because the CF piece never saturates.
inline double inv_slope_envelope(double nu, const EnvelopeGeometry& g) {
    if (!std::isfinite(nu) || nu < 0.0)
        throw std::domain_error("inv_slope_envelope: slope must be finite and nonnegative");
    if (g.degenerate) return inv_slope_cf(nu, g.s1, g.t);
    if (nu == 0.0)
        throw unbounded_error("inv_slope_envelope: zero slope, envelope never saturates");
    if (std::abs(nu - g.k) <= kSlopeTieTol * std::max(1.0, g.k)) return g.s_d;
    if (nu > g.k) return std::min(inv_slope_df(nu, g.s1, g.t), g.s_d);
    return std::max(inv_slope_cf(nu, g.s1, g.t), g.s_c);
}

}  // namespace hdrc
