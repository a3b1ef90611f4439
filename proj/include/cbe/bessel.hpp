#pragma once

#include <vector>

#include "cbe/common.hpp"
#include "cbe/rng.hpp"

namespace cbe {

// A 3-dimensional Bessel bridge from c0 at time t0 to c1 at time t1: the
// distance-below-the-line process of a walk confined under a slope-alpha
// barrier, conditioned at both ends.
struct BesselBridgeSpec {
  double t0 = 0.0;
  double t1 = 1.0;
  double c0 = 1.0;
  double c1 = 1.0;
  double alpha = 0.0;  // slope of the reference line (bookkeeping only)

  void validate() const {
    if (!(t0 < t1)) throw ConfigError("bessel bridge: requires t0 < t1");
    if (c0 <= 0.0 || c1 <= 0.0)
      throw ConfigError("bessel bridge: endpoint distances must be positive");
  }
};

// Marginal density of the bridge at interior time t, evaluated at u >= 0:
//   f(u) = Z sinh(c0 u/(t-t0)) sinh(u c1/(t1-t))
//            exp(-u^2/2(t-t0) - u^2/2(t1-t)),
// with the normalizer worked in the log domain
// (log sinh x = x - log 2 + log(1 - e^{-2x})).
double bessel_bridge_log_density(const BesselBridgeSpec& spec, double t,
                                 double u);
double bessel_bridge_density(const BesselBridgeSpec& spec, double t, double u);

// Euler-Maruyama path on the given time grid (grid.front() == t0,
// grid.back() == t1, resolution dt <= 1e-3 (t1 - t0)).  Uses the exact
// bridge drift (c1/s) coth(c1 y/s) - y/s with s = t1 - t; the final step is
// interpolated onto the pinned endpoint c1.  Paths are nonnegative.
std::vector<double> sample_bessel_bridge(const BesselBridgeSpec& spec,
                                         RngStream& stream,
                                         const std::vector<double>& t_grid);

// Probability that a Brownian bridge from x0 to x1 over time t stays
// positive: 1 - exp(-2 x0 x1 / t).
double bridge_positive_prob(double x0, double x1, double t);

}  // namespace cbe
