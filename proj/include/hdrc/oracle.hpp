#pragma once

// Brute-force validators. Everything in here is deliberately slow and dumb
// (dense grids, exhaustive scans) and shares nothing with the closed-form
// modules beyond the Shannon primitive, so it can sit on the other side of
// a cross-check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hdrc/rates.hpp"

namespace hdrc::oracle {

struct GridSpec {
    double s2_max = 10.0;
    std::size_t n_points = 1000;
    enum class Spacing { linear, logarithmic } spacing = Spacing::linear;
};

/// Sample locations for a grid spec. Logarithmic grids prepend 0 and span
/// eight decades below s2_max.
inline std::vector<double> grid_points(const GridSpec& spec) {
    if (spec.n_points < 2 || !(spec.s2_max > 0.0))
        throw std::invalid_argument("grid_points: need n_points >= 2 and s2_max > 0");
    std::vector<double> xs(spec.n_points);
    if (spec.spacing == GridSpec::Spacing::linear) {
        for (std::size_t i = 0; i < spec.n_points; ++i)
            xs[i] = spec.s2_max * static_cast<double>(i) / static_cast<double>(spec.n_points - 1);
    } else {
        xs[0] = 0.0;
        const double lo = std::log(spec.s2_max * 1e-8), hi = std::log(spec.s2_max);
        for (std::size_t i = 1; i < spec.n_points; ++i)
            xs[i] = std::exp(lo + (hi - lo) * static_cast<double>(i - 1) /
                                      static_cast<double>(spec.n_points - 2));
        xs.back() = spec.s2_max;
    }
    return xs;
}

/// Indices of the upper concave hull of (xs, ys), xs strictly increasing.
/// Monotone chain; collinear interior points are dropped.
inline std::vector<std::size_t> upper_hull_indices(const std::vector<double>& xs,
                                                   const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("upper_hull_indices: need two aligned samples");
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull.back();
            const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) -
                                 (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if (cross >= 0.0) hull.pop_back();  // b on or below chord a-i
            else break;
        }
        hull.push_back(i);
    }
    return hull;
}

struct HullBridge {
    bool found = false;
    bool warn = false;   // grid too coarse to tell a bridge apart from noise
    double s_d = 0.0;    // last hull vertex before the samples dip below
    double s_c = 0.0;    // first hull vertex after
    double slope = 0.0;  // secant slope between the two
};

struct HullOracleResult {
    std::vector<double> xs, ys;            // samples
    std::vector<std::size_t> hull;         // hull vertex indices
    HullBridge bridge;
};

/// Upper concave hull of hybrid-rate samples for fixed (s1, t), plus the
/// widest gap where samples fall measurably below the hull — the inferred
/// bridge of the concave envelope.
inline HullOracleResult hull_oracle(double s1, double t, const GridSpec& spec) {
    HullOracleResult res;
    res.xs = grid_points(spec);
    res.ys.resize(res.xs.size());
    for (std::size_t i = 0; i < res.xs.size(); ++i)
        res.ys[i] = rate_hybrid({s1, t, res.xs[i]});
    res.hull = upper_hull_indices(res.xs, res.ys);

    double best_width = 0.0;
    for (std::size_t v = 0; v + 1 < res.hull.size(); ++v) {
        const std::size_t i = res.hull[v], j = res.hull[v + 1];
        if (j <= i + 1) continue;
        // significance: some skipped sample sits clearly below the chord
        const double slope = (res.ys[j] - res.ys[i]) / (res.xs[j] - res.xs[i]);
        double max_below = 0.0;
        for (std::size_t m = i + 1; m < j; ++m) {
            const double chord = res.ys[i] + slope * (res.xs[m] - res.xs[i]);
            max_below = std::max(max_below, chord - res.ys[m]);
        }
        if (max_below <= 1e-9) continue;
        if (res.xs[j] - res.xs[i] > best_width) {
            best_width = res.xs[j] - res.xs[i];
            res.bridge.found = true;
            res.bridge.s_d = res.xs[i];
            res.bridge.s_c = res.xs[j];
            res.bridge.slope = slope;
        }
    }
    res.bridge.warn = !res.bridge.found;
    return res;
}

/// DF rate by direct grid maximization of the correlation coefficient,
/// refined coarse-to-fine until the grid step drops below 1/n_rho. The
/// inner minimum is unimodal in rho, so window refinement is sound.
inline double df_rate_oracle(double s1, double t, double s2, std::size_t n_rho) {
    if (n_rho < 1000) throw std::invalid_argument("df_rate_oracle: n_rho too small");
    const double c_relay = shannon(t * s1);
    const double c_direct = shannon(s1);
    const auto value_at = [&](double rho) {
        const double listen = c_relay + shannon((1.0 - rho * rho) * s1);
        const double combine =
            c_direct + shannon(s1 + s2 + 2.0 * rho * std::sqrt(s1 * s2));
        return 0.5 * std::min(listen, combine);
    };

    constexpr std::size_t kPts = 2000;  // per pass
    double lo = 0.0, hi = 1.0, best = -1.0, best_rho = 0.0;
    const double target_step = 1.0 / static_cast<double>(n_rho);
    for (int pass = 0; pass < 8; ++pass) {
        const double step = (hi - lo) / kPts;
        for (std::size_t i = 0; i <= kPts; ++i) {
            const double rho = lo + step * static_cast<double>(i);
            const double v = value_at(rho);
            if (v > best) {
                best = v;
                best_rho = rho;
            }
        }
        if (step <= target_step) break;
        lo = std::max(0.0, best_rho - 2.0 * step);
        hi = std::min(1.0, best_rho + 2.0 * step);
    }
    return best;
}

/// One-sided difference quotient with one Richardson step.
template <class F>
double fd_derivative(F&& f, double s2, double h, Side side) {
    const double sgn = (side == Side::right) ? 1.0 : -1.0;
    const double d1 = (f(s2 + sgn * h) - f(s2)) / (sgn * h);
    const double d2 = (f(s2 + sgn * 0.5 * h) - f(s2)) / (sgn * 0.5 * h);
    return 2.0 * d2 - d1;
}

struct OracleFadingState {
    double a31 = 0.0, a21 = 0.0, a32 = 0.0;
    double prob = 0.0;
};

struct OracleAllocation {
    double avg_rate = 0.0;
    double used_power = 0.0;
    double mu = 0.0;
    std::vector<double> s2;  // per-state allocation
};

/// Ground-truth allocation for a small discrete channel: dual sweep over
/// the power price with per-state exhaustive maximization of
/// rate(s2) - mu * s2 / (2 a32^2) over an s2 grid (correct for the
/// nonconcave hybrid rate too), keeping the best budget-feasible
/// assignment. Two passes: the second zooms each state's grid around the
/// first-pass optimum.
inline OracleAllocation discrete_allocation_oracle(
    const std::vector<OracleFadingState>& states, double p1_bar, double p2_bar,
    const std::function<double(const SnrState&)>& rate, std::size_t n_grid = 4000) {
    if (states.empty() || states.size() > 8)
        throw std::invalid_argument("discrete_allocation_oracle: need 1..8 states");
    if (!(p2_bar > 0.0))
        throw std::invalid_argument("discrete_allocation_oracle: budget must be positive");

    const std::size_t n = states.size();
    std::vector<double> s1(n), tt(n), w(n);  // w: relay power per unit s2
    for (std::size_t i = 0; i < n; ++i) {
        const double a31sq = states[i].a31 * states[i].a31;
        s1[i] = a31sq * p1_bar;
        tt[i] = states[i].a21 * states[i].a21 / std::max(a31sq, 1e-30);
        w[i] = (states[i].a32 > 0.0) ? 1.0 / (2.0 * states[i].a32 * states[i].a32) : 0.0;
    }

    const auto make_grid = [&](double lo, double hi) {
        std::vector<double> g;
        g.reserve(n_grid + 1);
        g.push_back(0.0);
        if (!(hi > 0.0)) return g;
        lo = std::max(lo, hi * 1e-7);
        const double llo = std::log(lo), lhi = std::log(hi);
        for (std::size_t j = 0; j + 1 < n_grid; ++j)
            g.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(j) /
                                           static_cast<double>(n_grid - 2)));
        g.push_back(hi);
        return g;
    };

    std::vector<std::vector<double>> grids(n), rates(n);
    const auto tabulate = [&](std::size_t i, double lo, double hi) {
        grids[i] = make_grid(lo, hi);
        rates[i].resize(grids[i].size());
        for (std::size_t j = 0; j < grids[i].size(); ++j)
            rates[i][j] = rate({s1[i], tt[i], grids[i][j]});
    };

    struct Assignment {
        double power = 0.0, avg_rate = 0.0;
        std::vector<std::size_t> pick;
    };
    const auto assign = [&](double mu) {
        Assignment a;
        a.pick.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t j = 0; j < grids[i].size(); ++j) {
                const double v = rates[i][j] - mu * w[i] * grids[i][j];
                if (v > best + 1e-15) {
                    best = v;
                    arg = j;
                }
            }
            a.pick[i] = (states[i].a32 > 0.0) ? arg : 0;
            a.power += states[i].prob * w[i] * grids[i][a.pick[i]];
            a.avg_rate += states[i].prob * rates[i][a.pick[i]];
        }
        return a;
    };

    OracleAllocation result;
    for (int pass = 0; pass < 2; ++pass) {
        if (pass == 0) {
            for (std::size_t i = 0; i < n; ++i) {
                const double cap = (states[i].prob > 0.0 && w[i] > 0.0)
                                       ? p2_bar / (states[i].prob * w[i])
                                       : 0.0;
                tabulate(i, 0.0, cap);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const double at = result.s2[i];
                const double hi = grids[i].size() > 1 ? grids[i].back() : 0.0;
                if (!(hi > 0.0)) continue;
                const double width = std::max(at * 0.05, hi * 4.0 / static_cast<double>(n_grid));
                tabulate(i, std::max(0.0, at - width), std::min(hi, at + width));
            }
        }

        Assignment best_feasible;
        best_feasible.avg_rate = -1.0;
        double best_mu = 0.0;
        Assignment free_ride = assign(0.0);
        if (free_ride.power <= p2_bar) {
            best_feasible = free_ride;
        } else {
            double mu_lo = 0.0, mu_hi = 1.0;
            for (int d = 0; d < 400 && assign(mu_hi).power > p2_bar; ++d) mu_hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (mu_lo + mu_hi);
                if (!(mid > mu_lo && mid < mu_hi)) break;
                const Assignment a = assign(mid);
                if (a.power > p2_bar) {
                    mu_lo = mid;
                } else {
                    mu_hi = mid;
                    if (a.avg_rate > best_feasible.avg_rate) {
                        best_feasible = a;
                        best_mu = mid;
                    }
                }
            }
            if (best_feasible.avg_rate < 0.0) {
                best_feasible = assign(mu_hi);
                best_mu = mu_hi;
            }
        }

        result.avg_rate = best_feasible.avg_rate;
        result.used_power = best_feasible.power;
        result.mu = best_mu;
        result.s2.resize(n);
        for (std::size_t i = 0; i < n; ++i) result.s2[i] = grids[i][best_feasible.pick[i]];
    }
    return result;
}

}  // namespace hdrc::oracle
