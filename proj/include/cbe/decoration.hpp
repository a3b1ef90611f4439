#pragma once

#include <cstddef>
#include <vector>

#include "cbe/common.hpp"
#include "cbe/field.hpp"
#include "cbe/rng.hpp"

namespace cbe {

// Coupled decoration diffusions on the window time interval [T_-, T_+]:
//   dL_t(theta) = i theta e^t / k1 dt + sqrt(4/beta) e^{i Im L_t(theta)} dW_t,
//   U_t(theta)  = -Re( sigma (L_t(theta) - i theta (e^t - 1)/k1) ) - centering,
// with one complex Brownian increment sequence (E|dW|^2 = 2 dt) shared by all
// theta.  Two variants of initial data are used: a "matched" start supplied by
// the caller, and a "flat" start L = 0 whose drift only switches on at the
// intermediate time T_dagger and whose diffusion carries a fixed extra phase.

enum class SdeVariant { kMatched, kFlat };

// Law selector for decoration sampling: the base law, or the base law with an
// independent uniform phase applied to the whole profile (sigma = 1 only; for
// sigma = i the two laws coincide).
enum class DecorationLaw { kBase, kPhaseRandomized };

struct SdeConfig {
  double beta = 2.0;
  double k1 = 32.0;  // window size; must exceed e so T_- < T_dagger < T_+
  Sigma sigma = Sigma::kOne;

  // Window times: T_- = log(k1/k1+), T_dagger = log(k1/k1-hat), T_+ = log k1.
  double t_minus = 0.0;
  double t_dagger = 0.0;
  double t_plus = 0.0;

  double dt = 1e-3;                // integrator step upper bound
  std::vector<double> theta_mesh;  // points in [-2 pi k1, 0], ascending

  // Constant subtracted inside U.  The flat variant uses sqrt(8/beta) log k1+;
  // a matched run against a finite field would use sqrt(8/beta) m_n instead.
  double centering = 0.0;

  double k4 = 5.0;  // length of the terminal cap window for barrier events
  double k5 = 4.0;  // lattice pitch parameter, pitch = 2 pi / (4 k5)

  double noise_scale = 1.0;  // 0 switches the diffusion off (deterministic ODE)
  bool store_paths = true;   // keep the full (time x theta) matrices

  // Populate times / mesh / centering from (beta, k1, sigma); dt becomes
  // min(dt_factor * (T_+ - T_-), 1e-2).
  static SdeConfig standard(double beta, double k1, Sigma sigma,
                            double dt_factor = 1e-3);

  void validate() const;
};

// The window lattice (2 pi / (4 k5)) Z intersected with [-2 pi k1, 0],
// ascending and ending at 0.
std::vector<double> decoration_lattice(double k1, double k5);

// Uniform integration grid from t_minus to t_plus with step <= config.dt.
std::vector<double> sde_time_grid(const SdeConfig& config);

struct DecorationPath {
  SdeVariant variant = SdeVariant::kFlat;
  std::vector<double> times;   // integration grid, t_minus .. t_plus
  std::vector<double> theta;   // copy of the theta mesh
  std::vector<cplx> l_final;   // L at T_+, one entry per theta
  std::vector<double> u_final; // U at T_+, one entry per theta
  std::vector<unsigned char> barrier_ok;  // per-theta flags (see barrier_event)

  // Row-major (time major) matrices, filled only when store_paths is set.
  std::vector<cplx> l_paths;
  std::vector<double> u_paths;

  std::size_t time_count() const { return times.size(); }
  std::size_t theta_count() const { return theta.size(); }
  bool has_stored_paths() const { return !u_paths.empty(); }

  const cplx& l_at(std::size_t t_index, std::size_t theta_index) const {
    return l_paths[t_index * theta.size() + theta_index];
  }
  double u_at(std::size_t t_index, std::size_t theta_index) const {
    return u_paths[t_index * theta.size() + theta_index];
  }
};

// Matched-start integration: initial_l supplies L at T_- per theta-mesh point;
// the drift runs on all of [T_-, T_+].
DecorationPath simulate_coupled(const SdeConfig& config,
                                const std::vector<cplx>& initial_l,
                                RngStream& stream);

// Flat-start integration: L = 0 at T_-, drift gated by t >= T_dagger, and the
// fixed phase factor e^{i phase} folded into the diffusion coefficient.
DecorationPath simulate_flat(const SdeConfig& config, RngStream& stream,
                             double phase = 0.0);

// Per-theta barrier flags: true iff
//   sqrt(8/beta) A_t^- <= U_t(theta) <= sqrt(8/beta) A_t^+
// at every grid time in [T_dagger, T_+ - k4], where
//   A_t^{+/-} = (t - T_+) - (T_+ - t)^{1/2 -/+ 3/7},
// and additionally
//   U_t(theta) <= sqrt(8/beta) (t - T_+ + (T_+ - t + (log k5)^50)^{1/50})
// at every grid time in [T_+ - k4, T_+].  Empty windows are vacuously
// satisfied.  Requires stored paths.
std::vector<unsigned char> barrier_event(const SdeConfig& config,
                                         const DecorationPath& path);

// The banana barrier A_t^{+/-} above (upper selects -3/7 in the exponent).
double decoration_barrier(double t, double t_plus, bool upper);

// One decoration draw: values on the theta mesh with the barrier indicator
// applied pointwise.
struct DecorationSample {
  std::vector<cplx> values;
  std::vector<unsigned char> barrier_ok;
};

// Draw n_samples decorations from the flat-start dynamics:
//   sigma = 1: exp(L_{T_+}(theta) - centering) 1{barrier},
//   sigma = i: exp(U_{T_+}(theta)) 1{barrier}.
// The phase-randomized law multiplies the whole sigma = 1 profile by an
// independent uniform phase (and equals the base law for sigma = i).
std::vector<DecorationSample> sample_decoration(const SdeConfig& config,
                                                RngStream& stream,
                                                std::size_t n_samples,
                                                DecorationLaw law =
                                                    DecorationLaw::kBase);

// Linear interpolation of a lattice profile at x (x within the lattice range).
cplx interpolate_decoration(const std::vector<double>& theta,
                            const std::vector<cplx>& values, double x);

// Trajectory of the phase gap Delta_t between the matched and flat variants
// driven by the same increments:
//   dDelta = theta e^t/k1 1[t <= T_dagger] dt + dB (1 - cos Delta)
//            - dU sin Delta,
// where dB = sqrt(4/beta) Im(e^{i Im L} dW), dU = -sqrt(4/beta) Re(e^{i Im L} dW)
// and L is the matched diffusion at the same theta, co-integrated with Delta.
struct PhaseGapTrajectory {
  std::vector<double> times;
  std::vector<double> delta;
  double min_delta = 0.0;
  double max_delta = 0.0;
};

PhaseGapTrajectory phase_gap_dynamics(const SdeConfig& config,
                                      RngStream& stream, double initial_gap,
                                      double theta);

// Single-ray survival estimate.  For one theta the centered projection
// y = sqrt(beta/4) U is a standard Brownian motion; it is started at
// -sqrt(beta/4) centering - h (depth h below the flat start) and the estimate
// is P( y_{T_+} >= -sqrt(beta/4) k7 and the barrier event holds ).  With
// importance sampling the path is tilted by drift sqrt(2) and reweighted by
// exp(-sqrt(2) (y_{T_+} - y_{T_-}) + (T_+ - T_-)).
struct OneRayResult {
  double p_hat = 0.0;
  double se = 0.0;
  std::size_t n_paths = 0;
  double hit_fraction = 0.0;  // fraction of simulated paths in the event
};

OneRayResult one_ray_survival(const SdeConfig& config, RngStream& stream,
                              double h, double k7, std::size_t n_paths,
                              bool importance_sampling);

}  // namespace cbe
