#pragma once

// Per-link amplitude fading models and the two ways expectations over them
// are discretized: quadrature atoms (Gauss-Legendre against the Rayleigh
// density, exact finite sums for discrete links) and seeded Monte Carlo
// draws. All randomness is derived from explicit 64-bit generator state so
// identical seeds give bit-identical results everywhere.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hdrc {

/// Link amplitudes |h31|, |h21|, |h32| for one fading block.
struct ChannelRealization {
    double a31 = 0.0;
    double a21 = 0.0;
    double a32 = 0.0;
};

enum class FadingKind { rayleigh, fixed, empirical };

/// Amplitude distribution of one link. Rayleigh scale sigma is the
/// underlying Gaussian component deviation, so E[|H|^2] = 2 sigma^2.
struct LinkFading {
    FadingKind kind = FadingKind::fixed;
    double param = 1.0;  // sigma (rayleigh) or the amplitude (fixed)
    std::vector<std::pair<double, double>> atoms;  // empirical (amplitude, prob)
};

/// Independent per-link fading model; p(h) factorizes over the links.
struct FadingModel {
    LinkFading a31, a21, a32;
};

inline void check_link(const LinkFading& link, const char* name) {
    switch (link.kind) {
        case FadingKind::rayleigh:
            if (!(link.param > 0.0) || !std::isfinite(link.param))
                throw std::invalid_argument(std::string(name) + ": rayleigh scale must be positive");
            return;
        case FadingKind::fixed:
            if (link.param < 0.0 || !std::isfinite(link.param))
                throw std::invalid_argument(std::string(name) + ": fixed amplitude must be >= 0");
            return;
        case FadingKind::empirical: {
            if (link.atoms.empty())
                throw std::invalid_argument(std::string(name) + ": empirical support is empty");
            double mass = 0.0;
            for (const auto& [amp, p] : link.atoms) {
                if (amp < 0.0 || !std::isfinite(amp) || p < 0.0 || !std::isfinite(p))
                    throw std::invalid_argument(std::string(name) + ": bad empirical atom");
                mass += p;
            }
            if (std::abs(mass - 1.0) > 1e-9)
                throw std::invalid_argument(std::string(name) +
                                            ": empirical probabilities must sum to 1");
            return;
        }
    }
}

inline void check_model(const FadingModel& model) {
    check_link(model.a31, "fading.a31");
    check_link(model.a21, "fading.a21");
    check_link(model.a32, "fading.a32");
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
inline std::vector<std::pair<double, double>> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<std::pair<double, double>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[static_cast<std::size_t>(i)] = {x, w};
        out[static_cast<std::size_t>(n - 1 - i)] = {-x, w};
    }
    return out;
}

inline double rayleigh_pdf(double a, double sigma) {
    return a / (sigma * sigma) * std::exp(-a * a / (2.0 * sigma * sigma));
}

/// Discretization of one link as (amplitude, weight) atoms. Rayleigh links
/// use nodes_per_dim Gauss-Legendre nodes on [0, 6 sigma] weighted by the
/// density (truncated tail mass < 2e-8, not renormalized); fixed and
/// empirical links are exact.
inline std::vector<std::pair<double, double>> link_atoms(const LinkFading& link,
                                                         int nodes_per_dim) {
    switch (link.kind) {
        case FadingKind::fixed:
            return {{link.param, 1.0}};
        case FadingKind::empirical:
            return link.atoms;
        case FadingKind::rayleigh: {
            const double hi = 6.0 * link.param;
            std::vector<std::pair<double, double>> atoms;
            atoms.reserve(static_cast<std::size_t>(nodes_per_dim));
            for (const auto& [x, w] : gauss_legendre(nodes_per_dim)) {
                const double a = 0.5 * hi * (x + 1.0);
                atoms.emplace_back(a, 0.5 * hi * w * rayleigh_pdf(a, link.param));
            }
            return atoms;
        }
    }
    throw std::logic_error("link_atoms: unreachable");
}

/// Uniform double in [0, 1) from the top 53 bits of the generator output;
/// bit-identical across platforms, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sample_amplitude(const LinkFading& link, std::mt19937_64& rng) {
    switch (link.kind) {
        case FadingKind::fixed:
            return link.param;
        case FadingKind::rayleigh: {
            const double u = unit_uniform(rng);
            return link.param * std::sqrt(-2.0 * std::log1p(-u));
        }
        case FadingKind::empirical: {
            const double u = unit_uniform(rng);
            double acc = 0.0;
            for (const auto& [amp, p] : link.atoms) {
                acc += p;
                if (u < acc) return amp;
            }
            return link.atoms.back().first;
        }
    }
    throw std::logic_error("sample_amplitude: unreachable");
}

inline ChannelRealization sample_realization(const FadingModel& model, std::mt19937_64& rng) {
    ChannelRealization h;
    h.a31 = sample_amplitude(model.a31, rng);
    h.a21 = sample_amplitude(model.a21, rng);
    h.a32 = sample_amplitude(model.a32, rng);
    return h;
}

}  // namespace hdrc
