#pragma once

// Safeguarded bisection on a bracketed sign change. Deliberately no Newton
// steps: the slope expressions this library inverts contain nested square
// roots that are ill-conditioned near branch boundaries, and a certified
// bracket never lies.

#include <cmath>
#include <cstddef>

namespace hdrc {

struct BisectResult {
    double x = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Root of g on [lo, hi] given g(lo) >= 0 >= g(hi). Uses a geometric
/// midpoint while the bracket spans more than a factor of 4 (the inverse
/// slope maps cover many decades of s2), then arithmetic midpoints down to
/// the requested tolerance, by default floating-point resolution. Capped at
/// max_iter.
template <class G>
BisectResult bisect_decreasing(G&& g, double lo, double hi, double abs_tol = 0.0,
                               double rel_tol = 0.0, std::size_t max_iter = 200) {
    BisectResult res;
    for (; res.iterations < max_iter; ++res.iterations) {
        double mid;
        if (lo > 0.0 && hi > 4.0 * lo) mid = std::sqrt(lo * hi);
        else mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;  // bracket at floating-point resolution
        if (g(mid) >= 0.0) lo = mid;
        else hi = mid;
        if (hi - lo <= abs_tol + rel_tol * hi) break;
    }
    res.x = 0.5 * (lo + hi);
    if (!(res.x >= lo && res.x <= hi)) res.x = lo;
    res.converged = (hi - lo) <= std::max(abs_tol + rel_tol * hi, 8.0 * (std::abs(hi) * 1e-16));
    return res;
}

}  // namespace hdrc
