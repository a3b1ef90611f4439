#include "cbe/bessel.hpp"

#include <cmath>
#include <limits>

namespace cbe {

namespace {

// log(sinh x) for x > 0 without overflow: x - log 2 + log(1 - e^{-2x}).
double log_sinh(double x) {
  CBE_CHECK(x > 0.0, "log_sinh: argument must be positive");
  if (x < 1e-4) {
    // sinh x = x (1 + x^2/6 + ...)
    return std::log(x) + x * x / 6.0;
  }
  return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
}

// coth x for x > 0, stable at both ends.
double coth(double x) {
  CBE_CHECK(x > 0.0, "coth: argument must be positive");
  if (x < 1e-6) return 1.0 / x + x / 3.0;
  if (x > 350.0) return 1.0;
  const double e = std::exp(-2.0 * x);
  return (1.0 + e) / (1.0 - e);
}

}  // namespace

double bessel_bridge_log_density(const BesselBridgeSpec& spec, double t,
                                 double u) {
  spec.validate();
  if (!(t > spec.t0 && t < spec.t1))
    throw ConfigError("bessel bridge density: t must lie strictly inside (t0, t1)");
  if (u < 0.0)
    throw ConfigError("bessel bridge density: u must be nonnegative");
  if (u == 0.0) return -std::numeric_limits<double>::infinity();

  const double s0 = t - spec.t0;   // elapsed since the left pin
  const double s1 = spec.t1 - t;   // remaining until the right pin
  const double T = spec.t1 - spec.t0;
  const double c0 = spec.c0;
  const double c1 = spec.c1;

  double lf = 0.5 * std::log(2.0 / kPi) + 0.5 * std::log(T / (s0 * s1));
  lf += log_sinh(c0 * u / s0) + log_sinh(u * c1 / s1);
  lf -= u * u / (2.0 * s0) + u * u / (2.0 * s1);
  lf -= c0 * c0 / (2.0 * s0) + c1 * c1 / (2.0 * s1);
  lf += c0 * c0 / (2.0 * T) + c1 * c1 / (2.0 * T);
  lf -= log_sinh(c0 * c1 / T);
  return lf;
}

double bessel_bridge_density(const BesselBridgeSpec& spec, double t, double u) {
  if (u == 0.0) {
    spec.validate();
    if (!(t > spec.t0 && t < spec.t1))
      throw ConfigError(
          "bessel bridge density: t must lie strictly inside (t0, t1)");
    return 0.0;
  }
  return std::exp(bessel_bridge_log_density(spec, t, u));
}

std::vector<double> sample_bessel_bridge(const BesselBridgeSpec& spec,
                                         RngStream& stream,
                                         const std::vector<double>& t_grid) {
  spec.validate();
  if (t_grid.size() < 2)
    throw ConfigError("bessel bridge sampler: grid needs at least two points");
  const double span = spec.t1 - spec.t0;
  const double tol = 1e-9 * (1.0 + std::abs(spec.t0) + std::abs(spec.t1));
  if (std::abs(t_grid.front() - spec.t0) > tol ||
      std::abs(t_grid.back() - spec.t1) > tol)
    throw ConfigError("bessel bridge sampler: grid must start at t0 and end at t1");
  double max_dt = 0.0;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    const double dt = t_grid[i + 1] - t_grid[i];
    if (!(dt > 0.0))
      throw ConfigError("bessel bridge sampler: grid must be strictly increasing");
    max_dt = std::max(max_dt, dt);
  }
  if (max_dt > 1e-3 * span + tol)
    throw ConfigError(
        "bessel bridge sampler: grid resolution must satisfy dt <= 1e-3 (t1 - t0)");

  std::vector<double> path(t_grid.size());
  path[0] = spec.c0;
  double y = spec.c0;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    const double dt = t_grid[i + 1] - t_grid[i];
    const double s = spec.t1 - t_grid[i];  // time remaining to the right pin
    const double yy = std::max(y, 1e-12);
    const double drift = (spec.c1 / s) * coth(spec.c1 * yy / s) - yy / s;
    y = yy + drift * dt + std::sqrt(dt) * stream.normal();
    y = std::abs(y);  // the bridge is a radial process; reflect at the origin
    CBE_CHECK(std::isfinite(y), "bessel bridge sampler: path diverged");
    path[i + 1] = y;
  }
  path.back() = spec.c1;  // pin the terminal value exactly
  return path;
}

double bridge_positive_prob(double x0, double x1, double t) {
  if (x0 < 0.0 || x1 < 0.0)
    throw ConfigError("bridge_positive_prob: endpoints must be nonnegative");
  if (!(t > 0.0)) throw ConfigError("bridge_positive_prob: t must be positive");
  return -std::expm1(-2.0 * x0 * x1 / t);
}

}  // namespace cbe
