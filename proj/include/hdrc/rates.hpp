#pragma once

// Closed-form static rates of a half-duplex relay channel.
//
// Everything here is a pure function of the dimensionless operating point
// (s1, t, s2):
//   s1 = |h31|^2 P1          receiver SNR of the source-destination link
//   t  = |h21|^2 / |h31|^2   source-relay vs source-destination quality ratio
//   s2 = 2 |h32|^2 P2        receiver SNR of the relay-destination link
//                            (factor 2: the relay transmits in one of the
//                            two equal-length phases)
// Rates are in bits per channel use, averaged over the two phases.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace hdrc {

inline constexpr double kLn2 = 0.69314718055994530942;

/// Absolute tolerance used when classifying s2 against branch thresholds.
inline constexpr double kS2Tol = 1e-12;

/// Shannon rate log2(1+x) of a complex AWGN channel at SNR x.
inline double shannon(double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::domain_error("shannon: SNR must be finite and nonnegative");
    return std::log2(1.0 + x);
}

/// Operating point of the static relay channel.
struct SnrState {
    double s1 = 0.0;
    double t = 0.0;
    double s2 = 0.0;

    bool valid() const {
        return std::isfinite(s1) && s1 >= 0.0 && std::isfinite(t) && t >= 0.0 &&
               std::isfinite(s2) && s2 >= 0.0;
    }
};

inline void check_state(const SnrState& st, const char* who) {
    if (!st.valid()) throw std::domain_error(std::string(who) + ": invalid SNR state");
}

/// Auxiliary SNR ratio eta = (1 + t*s1) / (1 + s1).
inline double eta(double s1, double t) { return (1.0 + t * s1) / (1.0 + s1); }

/// Saturation threshold: for s2 >= (t-1)*s1 the DF rate stops growing.
/// Negative when t < 1 (DF is saturated for every s2 >= 0).
inline double df_saturation_limit(double s1, double t) { return (t - 1.0) * s1; }

/// Coherent-combining threshold: below it the optimal DF correlation would
/// exceed 1. The branch is empty (nullopt) unless t > s1 + 2.
inline std::optional<double> df_coherent_limit(double s1, double t) {
    if (!(s1 > 0.0) || !(t > s1 + 2.0)) return std::nullopt;
    const double r = std::sqrt(t - eta(s1, t)) - 1.0;
    return s1 * r * r;
}

/// Correlation between source and relay codewords that equalizes the two
/// decoding constraints of DF. Returned unclamped; values outside [0,1]
/// mean the equalizing point falls outside the admissible range and the
/// regime classifier decides instead. nullopt: no real solution exists
/// (radicand significantly negative).
inline std::optional<double> df_correlation(const SnrState& st) {
    check_state(st, "df_correlation");
    if (!(st.s1 > 0.0)) throw std::domain_error("df_correlation: s1 must be positive");
    const double e = eta(st.s1, st.t);
    double radicand = st.s2 + e * (st.t * st.s1 - st.s1 - st.s2);
    if (radicand < 0.0) {
        if (radicand >= -kS2Tol * std::max(1.0, st.s2)) radicand = 0.0;
        else return std::nullopt;
    }
    return (std::sqrt(radicand) - std::sqrt(st.s2)) / (e * std::sqrt(st.s1));
}

/// DF operating regime as a function of s2 for fixed (s1, t).
enum class DfRegime {
    coherent,    // s2 < f1: optimal correlation clamps at 1
    correlated,  // f1 <= s2 < f2: equalizing correlation in [0, 1]
    saturated,   // s2 >= f2: relay link no longer the bottleneck
};

/// Classify s2 against the branch thresholds. Closed boundaries: s2 = f1
/// maps to correlated, s2 = f2 to saturated.
inline DfRegime df_regime(double s1, double t, double s2) {
    const double f2 = df_saturation_limit(s1, t);
    if (s2 >= f2 - kS2Tol) return DfRegime::saturated;
    if (const auto f1 = df_coherent_limit(s1, t); f1 && s2 < *f1 - kS2Tol)
        return DfRegime::coherent;
    return DfRegime::correlated;
}

/// Decode-and-forward rate. Continuous and nondecreasing in s2; constant
/// at (C(s1) + C(t*s1))/2 once s2 reaches the saturation threshold.
inline double rate_df(const SnrState& st) {
    check_state(st, "rate_df");
    const double half_direct = 0.5 * shannon(st.s1);
    switch (df_regime(st.s1, st.t, st.s2)) {
        case DfRegime::saturated:
            return half_direct + 0.5 * shannon(st.t * st.s1);
        case DfRegime::coherent: {
            const double sum = std::sqrt(st.s1) + std::sqrt(st.s2);
            return half_direct + 0.5 * shannon(sum * sum);
        }
        case DfRegime::correlated: {
            const auto rho = df_correlation(st);
            const double r = std::clamp(rho.value_or(1.0), 0.0, 1.0);
            return half_direct +
                   0.5 * shannon(st.s1 + st.s2 + 2.0 * r * std::sqrt(st.s1 * st.s2));
        }
    }
    return 0.0;  // unreachable
}

/// g_c(s2) = 1 + s1 + t*s1*s2 / (1 + (t+1)*s1 + s2), the argument of the
/// second log in the CF rate shifted by 1.
inline double cf_gain(double s1, double t, double s2) {
    const double a = 1.0 + (t + 1.0) * s1;
    return 1.0 + s1 + t * s1 * s2 / (a + s2);
}

/// Compress-and-forward rate. Strictly increasing in s2 for s1, t > 0 with
/// limit (C(s1) + C(s1 + t*s1))/2.
inline double rate_cf(const SnrState& st) {
    check_state(st, "rate_cf");
    return 0.5 * shannon(st.s1) + 0.5 * std::log2(cf_gain(st.s1, st.t, st.s2));
}

/// Best of DF and CF at the given operating point.
inline double rate_hybrid(const SnrState& st) { return std::max(rate_df(st), rate_cf(st)); }

/// The s2 above which CF beats DF: f = (t-1)(1 + (t+1)*s1).
/// nullopt for t <= 1 (CF dominates everywhere).
inline std::optional<double> df_cf_crossover(double s1, double t) {
    if (!(t > 1.0)) return std::nullopt;
    return (t - 1.0) * (1.0 + (t + 1.0) * s1);
}

enum class Side { left, right };

/// d g_d / d s2 on the correlated branch, where
/// g_d(s2) = s1 + s2 + 2 rho* sqrt(s1 s2). Diverges as s2 -> 0+.
inline double df_gain_slope(double s1, double t, double s2) {
    const double e = eta(s1, t);
    const double u = s2 * s2 + e * (t * s1 - s1 - s2) * s2;
    return 1.0 - 2.0 / e +
           (2.0 * (1.0 - e) * s2 + e * (t * s1 - s1)) / (e * std::sqrt(u));
}

/// One-sided derivative of the DF rate w.r.t. s2 (bits per unit SNR).
/// The side only matters at the coherent/correlated kink, where the left
/// value exceeds the right one. Exactly zero from the saturation threshold
/// on. Returns +infinity as s2 -> 0 where the slope diverges.
inline double rate_df_slope(const SnrState& st, Side side) {
    check_state(st, "rate_df_slope");
    const double s1 = st.s1, t = st.t, s2 = st.s2;
    const double f2 = df_saturation_limit(s1, t);
    if (s2 >= f2 - kS2Tol) return 0.0;
    const auto f1 = df_coherent_limit(s1, t);
    const bool at_kink = f1 && std::abs(s2 - *f1) <= kS2Tol;
    const bool coherent = f1 && (s2 < *f1 - kS2Tol || (at_kink && side == Side::left));
    if (coherent) {
        if (s2 == 0.0) return std::numeric_limits<double>::infinity();
        const double sum = std::sqrt(s1) + std::sqrt(s2);
        return (std::sqrt(s1 / s2) + 1.0) / (2.0 * (1.0 + sum * sum) * kLn2);
    }
    if (s2 == 0.0 && !(t > 1.0)) return 0.0;
    double rho = 1.0;
    if (s2 > 0.0) {
        const auto r = df_correlation(st);
        rho = std::clamp(r.value_or(1.0), 0.0, 1.0);
    }
    const double gd = s1 + s2 + 2.0 * rho * std::sqrt(s1 * s2);
    return df_gain_slope(s1, t, s2) / (2.0 * (1.0 + gd) * kLn2);
}

/// Derivative of the CF rate w.r.t. s2: g_c'(s2) / (2 g_c(s2) ln 2).
/// Finite at s2 = 0 and strictly decreasing in s2.
inline double rate_cf_slope(const SnrState& st) {
    check_state(st, "rate_cf_slope");
    const double a = 1.0 + (st.t + 1.0) * st.s1;
    const double num = st.t * st.s1 * a / ((a + st.s2) * (a + st.s2));
    return num / (2.0 * cf_gain(st.s1, st.t, st.s2) * kLn2);
}

}  // namespace hdrc
