#pragma once

#include <stdexcept>
#include <string>

namespace hdrc {

/// The requested optimum does not exist at a finite SNR (e.g. asking the
/// compress-and-forward inverse for the point of zero marginal rate).
class unbounded_error : public std::domain_error {
  public:
    explicit unbounded_error(const std::string& what) : std::domain_error(what) {}
};

/// Envelope construction could not bracket a common tangent slope.
/// Carries the diagnostic bracket values for the caller.
class no_bridge_error : public std::runtime_error {
  public:
    no_bridge_error(const std::string& what, double nu_lo, double nu_hi, double gap_lo, double gap_hi)
        : std::runtime_error(what), nu_lo(nu_lo), nu_hi(nu_hi), gap_lo(gap_lo), gap_hi(gap_hi) {}
    double nu_lo, nu_hi, gap_lo, gap_hi;
};

}  // namespace hdrc
