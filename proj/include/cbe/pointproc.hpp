#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cbe/common.hpp"
#include "cbe/extremes.hpp"  // MarkedPoint
#include "cbe/rng.hpp"

namespace cbe {

// A finite multiset of marked points (theta, v, decoration profile).
struct PointConfiguration {
  std::vector<MarkedPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Ground distance between marked points:
//   min(1, d_Theta(theta_1, theta_2) + |v_1 - v_2| + sup_theta |f_1 - f_2|),
// where d_Theta is arc distance on R / 2 pi Z.  The decorations must be stored
// on the same window mesh.
double dist_point(const MarkedPoint& a, const MarkedPoint& b);

// Configuration distances for equal cardinality n > 0:
//   first  = bottleneck distance (min over pairings of the max ground cost),
//   second = average distance (min over pairings of the mean ground cost).
// Unequal cardinalities give (1, 1); two empty configurations give (0, 0).
std::pair<double, double> dist_config(const PointConfiguration& x,
                                      const PointConfiguration& y);

// Monte Carlo upper bound on the process distances (the coupling infima are
// not computable; the estimate reports the realized coupling by name).
struct ProcessDistanceEstimate {
  double bottleneck_mean = 0.0;  // upper bound estimate for the inf-E bottleneck
  double bottleneck_se = 0.0;
  double average_mean = 0.0;     // upper bound estimate for the inf-E average
  double average_se = 0.0;
  std::size_t n_pairs = 0;
  std::string coupling;          // "shared-randomness" or "independent"
};

using ConfigurationSampler = std::function<PointConfiguration(RngStream&)>;

ProcessDistanceEstimate dist_process_estimate(const ConfigurationSampler& p,
                                              const ConfigurationSampler& q,
                                              std::size_t n_pairs,
                                              RngStream& stream,
                                              bool shared_randomness);

// Finite measure on the mark space represented by weighted atoms.
struct WeightedPointMeasure {
  std::vector<MarkedPoint> atoms;
  std::vector<double> weights;

  double total_mass() const;
};

// Test function for the bounded-Lipschitz metric: 1-bounded and 1-Lipschitz
// with respect to the ground distance.
using BlTestFunction = std::function<double(const MarkedPoint&)>;

// Standard dictionary: 64 periodic hat functions of theta, 32 clipped-linear
// functions of v on [-4, 4], 16 sup-norm functionals of the decoration versus
// fixed constants, and all cross-family products scaled by 1/2.
std::vector<BlTestFunction> standard_bl_dictionary();

struct BlEstimate {
  double value = 0.0;           // max |mu(f) - nu(f)| over the dictionary
  std::size_t best_index = 0;   // dictionary entry achieving the max
  std::size_t dictionary_size = 0;
};

// Lower-bound estimate of the bounded-Lipschitz distance over the dictionary.
BlEstimate d_bl(const WeightedPointMeasure& mu, const WeightedPointMeasure& nu,
                const std::vector<BlTestFunction>& dictionary);

// Finite intensity measure: total mass plus a sampler for the normalized law.
struct FiniteIntensity {
  double total_mass = 0.0;
  std::function<MarkedPoint(RngStream&)> sampler;
};

// Poisson process draw: N ~ Poisson(total mass), then N iid marked points.
// Nonpositive mass yields the empty configuration.
PointConfiguration sample_poisson(const FiniteIntensity& intensity,
                                  RngStream& stream);

// One local dependency group of the Poisson-approximation bound.
struct LocalMoments {
  double e_p = 0.0;   // E P_i
  double e_t = 0.0;   // E T_i
  double e_tp = 0.0;  // E T_i P_i
  double l = 1.0;     // group scale L_i > 0
};

// C (Var + 3 Lambda)^{3/2} sum_i (E P_i E T_i + E T_i P_i + (E P_i)^2) / L_i^2.
// The universal constant C is a caller-supplied parameter, default 1; results
// are meaningful up to that constant only.
double pp_bound(const std::vector<LocalMoments>& groups, double variance,
                double lambda, double c = 1.0);

// Change-of-intensity comparison for Poisson processes with total masses
// mass_pi and mass_lambda whose normalized intensities differ by d_bl_value:
//   average-distance bound = ((1 - e^{-alpha}) / alpha) d_bl, alpha = min mass,
//   bottleneck bound = sqrt(2) max-mass ((1 - e^{-alpha}) / alpha) d_bl.
struct IntensityChangeBound {
  double factor = 1.0;            // (1 - e^{-alpha}) / alpha
  double average_bound = 0.0;     // bound on the average-coupling distance
  double bottleneck_bound = 0.0;  // bound on the bottleneck-coupling distance
};

IntensityChangeBound intensity_change_bound(double d_bl_value, double mass_pi,
                                            double mass_lambda);

// Histogram estimate of the total-variation distance between the wrapped
// variable (alpha + Z) mod 1, Z ~ N(0, V), and the uniform law on [0, 1).
// The few-bin default keeps the noise floor of the estimate below 1e-3 at
// 1e6 samples; the reported standard error is the conservative delta-method
// value.
struct WrappedGaussianTv {
  double tv = 0.0;
  double se = 0.0;
  std::size_t bins = 0;
  std::size_t n_samples = 0;
};

WrappedGaussianTv wrapped_gaussian_tv(double v, std::size_t n_samples,
                                      RngStream& stream, double alpha = 0.0,
                                      std::size_t bins = 4);

}  // namespace cbe
