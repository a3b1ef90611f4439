#include "cbe/decoration.hpp"

#include <algorithm>
#include <cmath>

#include "cbe/extremes.hpp"

namespace cbe {

namespace {

constexpr double kTimeTol = 1e-9;

// Shared Euler-Maruyama core for the matched and flat variants.
DecorationPath integrate(const SdeConfig& config, SdeVariant variant,
                         const std::vector<cplx>& initial_l, double phase,
                         RngStream& stream) {
  config.validate();
  if (config.dt > 1e-2 + kTimeTol)
    throw ConfigError("decoration sde: dt must be at most 1e-2");
  if (config.theta_mesh.empty())
    throw ConfigError("decoration sde: theta mesh is empty");
  if (initial_l.size() != config.theta_mesh.size())
    throw ConfigError("decoration sde: initial condition size mismatch");

  const std::size_t m = config.theta_mesh.size();
  const std::vector<double> times = sde_time_grid(config);
  const std::size_t steps = times.size() - 1;
  const double dt = (config.t_plus - config.t_minus) / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);
  const double diff_coef =
      config.noise_scale * std::sqrt(4.0 / config.beta);
  const cplx sv = sigma_value(config.sigma);
  const bool gate_drift = (variant == SdeVariant::kFlat);
  const double cos_p = std::cos(phase), sin_p = std::sin(phase);

  DecorationPath path;
  path.variant = variant;
  path.times = times;
  path.theta = config.theta_mesh;
  if (config.store_paths) {
    path.l_paths.resize(times.size() * m);
    path.u_paths.resize(times.size() * m);
  }

  std::vector<double> lr(m), li(m);
  for (std::size_t x = 0; x < m; ++x) {
    lr[x] = initial_l[x].real();
    li[x] = initial_l[x].imag();
  }

  const auto record_row = [&](std::size_t row, double t) {
    const double growth = (std::exp(t) - 1.0) / config.k1;
    for (std::size_t x = 0; x < m; ++x) {
      const cplx l(lr[x], li[x]);
      const double u =
          -(sv * (l - cplx(0.0, config.theta_mesh[x] * growth))).real() -
          config.centering;
      CBE_CHECK(std::isfinite(u) && std::isfinite(lr[x]) && std::isfinite(li[x]),
                "decoration sde: path diverged");
      if (config.store_paths) {
        path.l_paths[row * m + x] = l;
        path.u_paths[row * m + x] = u;
      }
      if (row == steps) {
        path.l_final[x] = l;
        path.u_final[x] = u;
      }
    }
  };

  path.l_final.resize(m);
  path.u_final.resize(m);
  record_row(0, times[0]);

  for (std::size_t i = 0; i < steps; ++i) {
    const double t = times[i];
    double g1 = 0.0, g2 = 0.0;
    stream.normal_pair(g1, g2);
    const double dwr = sqrt_dt * g1;  // one complex increment, shared by all theta
    const double dwi = sqrt_dt * g2;
    const double drift_scale =
        (!gate_drift || t >= config.t_dagger - kTimeTol)
            ? std::exp(t) * dt / config.k1
            : 0.0;
    for (std::size_t x = 0; x < m; ++x) {
      double c = std::cos(li[x]);
      double s = std::sin(li[x]);
      if (variant == SdeVariant::kFlat) {
        // fold the fixed phase into the diffusion coefficient
        const double c2 = c * cos_p - s * sin_p;
        const double s2 = s * cos_p + c * sin_p;
        c = c2;
        s = s2;
      }
      lr[x] += diff_coef * (c * dwr - s * dwi);
      li[x] += config.theta_mesh[x] * drift_scale +
               diff_coef * (s * dwr + c * dwi);
    }
    record_row(i + 1, times[i + 1]);
  }
  return path;
}

}  // namespace

SdeConfig SdeConfig::standard(double beta, double k1, Sigma sigma,
                              double dt_factor) {
  if (!(beta > 0.0)) throw ConfigError("decoration sde: beta must be positive");
  if (!(k1 > std::exp(1.0)))
    throw ConfigError("decoration sde: k1 must exceed e for ordered window times");
  if (!(dt_factor > 0.0))
    throw ConfigError("decoration sde: dt factor must be positive");
  SdeConfig config;
  config.beta = beta;
  config.k1 = k1;
  config.sigma = sigma;
  config.t_minus = std::log(k1 / k1_plus(k1));
  config.t_dagger = std::log(k1 / k1_hat(k1));
  config.t_plus = std::log(k1);
  config.dt = std::min(dt_factor * (config.t_plus - config.t_minus), 1e-2);
  config.theta_mesh = decoration_lattice(k1, config.k5);
  config.centering = std::sqrt(8.0 / beta) * std::log(k1_plus(k1));
  return config;
}

void SdeConfig::validate() const {
  if (!(beta > 0.0)) throw ConfigError("decoration sde: beta must be positive");
  if (!(k1 > 1.0)) throw ConfigError("decoration sde: k1 must exceed 1");
  if (!(t_minus < t_dagger && t_dagger < t_plus))
    throw ConfigError("decoration sde: window times must satisfy T- < Tdagger < T+");
  if (!(dt > 0.0)) throw ConfigError("decoration sde: dt must be positive");
  if (!(k4 > 0.0) || !(k5 > 0.0))
    throw ConfigError("decoration sde: k4 and k5 must be positive");
  if (noise_scale < 0.0)
    throw ConfigError("decoration sde: noise scale must be nonnegative");
  const double lo = -kTwoPi * k1 - 1e-9;
  for (std::size_t i = 0; i < theta_mesh.size(); ++i) {
    if (theta_mesh[i] < lo || theta_mesh[i] > 1e-9)
      throw ConfigError("decoration sde: theta mesh point outside [-2 pi k1, 0]");
    if (i > 0 && !(theta_mesh[i] > theta_mesh[i - 1]))
      throw ConfigError("decoration sde: theta mesh must be strictly increasing");
  }
}

std::vector<double> decoration_lattice(double k1, double k5) {
  if (!(k1 > 0.0) || !(k5 > 0.0))
    throw ConfigError("decoration lattice: k1 and k5 must be positive");
  const double pitch = kTwoPi / (4.0 * k5);
  const auto j_min =
      static_cast<long long>(std::ceil(-kTwoPi * k1 / pitch - 1e-12));
  std::vector<double> lattice;
  lattice.reserve(static_cast<std::size_t>(-j_min + 1));
  for (long long j = j_min; j <= 0; ++j)
    lattice.push_back(static_cast<double>(j) * pitch);
  return lattice;
}

std::vector<double> sde_time_grid(const SdeConfig& config) {
  const double span = config.t_plus - config.t_minus;
  const auto steps =
      static_cast<std::size_t>(std::ceil(span / config.dt - kTimeTol));
  std::vector<double> times(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    times[i] =
        config.t_minus + span * static_cast<double>(i) / static_cast<double>(steps);
  times.back() = config.t_plus;
  return times;
}

DecorationPath simulate_coupled(const SdeConfig& config,
                                const std::vector<cplx>& initial_l,
                                RngStream& stream) {
  return integrate(config, SdeVariant::kMatched, initial_l, 0.0, stream);
}

DecorationPath simulate_flat(const SdeConfig& config, RngStream& stream,
                             double phase) {
  const std::vector<cplx> zeros(config.theta_mesh.size(), cplx(0.0, 0.0));
  return integrate(config, SdeVariant::kFlat, zeros, phase, stream);
}

double decoration_barrier(double t, double t_plus, bool upper) {
  const double s = t_plus - t;
  if (s < 0.0)
    throw ConfigError("decoration barrier: t must not exceed the terminal time");
  const double expo = upper ? (0.5 - 3.0 / 7.0) : (0.5 + 3.0 / 7.0);
  return (t - t_plus) - std::pow(s, expo);
}

std::vector<unsigned char> barrier_event(const SdeConfig& config,
                                         const DecorationPath& path) {
  if (!path.has_stored_paths())
    throw ConfigError("barrier event: path was simulated without stored trajectories");
  const std::size_t m = path.theta_count();
  const double scale = std::sqrt(8.0 / config.beta);
  const double cap_const = std::pow(std::log(config.k5), 50.0);
  const double banana_hi = config.t_plus - config.k4;

  std::vector<unsigned char> flags(m, 1);
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double t = path.times[i];
    const bool in_banana =
        t >= config.t_dagger - kTimeTol && t <= banana_hi + kTimeTol;
    const bool in_cap = t >= banana_hi - kTimeTol;
    if (!in_banana && !in_cap) continue;
    const double lo = scale * decoration_barrier(t, config.t_plus, false);
    const double hi = scale * decoration_barrier(t, config.t_plus, true);
    const double cap =
        scale * (t - config.t_plus +
                 std::pow(config.t_plus - t + cap_const, 1.0 / 50.0));
    for (std::size_t x = 0; x < m; ++x) {
      if (!flags[x]) continue;
      const double u = path.u_at(i, x);
      if (in_banana && (u < lo || u > hi)) flags[x] = 0;
      if (in_cap && u > cap) flags[x] = 0;
    }
  }
  return flags;
}

std::vector<DecorationSample> sample_decoration(const SdeConfig& config,
                                                RngStream& stream,
                                                std::size_t n_samples,
                                                DecorationLaw law) {
  SdeConfig local = config;
  local.store_paths = true;
  const std::size_t m = local.theta_mesh.size();

  std::vector<DecorationSample> samples;
  samples.reserve(n_samples);
  for (std::size_t r = 0; r < n_samples; ++r) {
    DecorationPath path = simulate_flat(local, stream);
    DecorationSample sample;
    sample.barrier_ok = barrier_event(local, path);
    sample.values.resize(m);
    cplx phase(1.0, 0.0);
    if (law == DecorationLaw::kPhaseRandomized && config.sigma == Sigma::kOne)
      phase = std::polar(1.0, stream.uniform_angle());
    for (std::size_t x = 0; x < m; ++x) {
      if (!sample.barrier_ok[x]) {
        sample.values[x] = cplx(0.0, 0.0);
        continue;
      }
      if (config.sigma == Sigma::kOne) {
        sample.values[x] =
            phase * std::exp(path.l_final[x] - local.centering);
      } else {
        sample.values[x] = cplx(std::exp(path.u_final[x]), 0.0);
      }
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

cplx interpolate_decoration(const std::vector<double>& theta,
                            const std::vector<cplx>& values, double x) {
  if (theta.size() != values.size() || theta.size() < 2)
    throw ConfigError("decoration interpolation: need matching lattice/values");
  if (x < theta.front() - 1e-12 || x > theta.back() + 1e-12)
    throw ConfigError("decoration interpolation: point outside the lattice range");
  const auto it = std::upper_bound(theta.begin(), theta.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - theta.begin());
  if (hi == 0) hi = 1;
  if (hi == theta.size()) hi = theta.size() - 1;
  const std::size_t lo = hi - 1;
  const double w = (x - theta[lo]) / (theta[hi] - theta[lo]);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

PhaseGapTrajectory phase_gap_dynamics(const SdeConfig& config,
                                      RngStream& stream, double initial_gap,
                                      double theta) {
  config.validate();
  const std::vector<double> times = sde_time_grid(config);
  const std::size_t steps = times.size() - 1;
  const double dt = (config.t_plus - config.t_minus) / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);
  const double coef = config.noise_scale * std::sqrt(4.0 / config.beta);

  PhaseGapTrajectory out;
  out.times = times;
  out.delta.resize(times.size());

  // Co-integrated matched diffusion at this theta supplies the phase; it is
  // started at i * initial_gap so the gap at T_- equals initial_gap.
  double lr = 0.0, li = initial_gap;
  double delta = initial_gap;
  out.delta[0] = delta;
  out.min_delta = delta;
  out.max_delta = delta;

  for (std::size_t i = 0; i < steps; ++i) {
    const double t = times[i];
    double g1 = 0.0, g2 = 0.0;
    stream.normal_pair(g1, g2);
    const double dwr = sqrt_dt * g1;
    const double dwi = sqrt_dt * g2;
    const double c = std::cos(li);
    const double s = std::sin(li);
    const double zr = c * dwr - s * dwi;  // e^{i Im L} dW
    const double zi = s * dwr + c * dwi;
    const double db = coef * zi;
    const double du = -coef * zr;
    const double drift =
        (t <= config.t_dagger + kTimeTol) ? theta * std::exp(t) * dt / config.k1
                                          : 0.0;
    delta += drift + db * (1.0 - std::cos(delta)) - du * std::sin(delta);
    lr += coef * zr;  // the i theta e^t/k1 drift of L is purely imaginary
    li += theta * std::exp(t) * dt / config.k1 + coef * zi;
    CBE_CHECK(std::isfinite(delta), "phase gap dynamics: trajectory diverged");
    out.delta[i + 1] = delta;
    out.min_delta = std::min(out.min_delta, delta);
    out.max_delta = std::max(out.max_delta, delta);
  }
  return out;
}

OneRayResult one_ray_survival(const SdeConfig& config, RngStream& stream,
                              double h, double k7, std::size_t n_paths,
                              bool importance_sampling) {
  config.validate();
  if (h < 0.0) throw ConfigError("one ray survival: h must be nonnegative");
  if (n_paths == 0) throw ConfigError("one ray survival: need at least one path");

  const std::vector<double> times = sde_time_grid(config);
  const std::size_t steps = times.size() - 1;
  const double span = config.t_plus - config.t_minus;
  const double dt = span / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);
  const double sqrt2 = std::sqrt(2.0);
  const double y_scale = std::sqrt(config.beta / 4.0);
  const double y0 = -y_scale * config.centering - h;
  const double y_floor = -y_scale * k7;
  const double cap_const = std::pow(std::log(config.k5), 50.0);
  const double banana_hi = config.t_plus - config.k4;

  double sum = 0.0, sum_sq = 0.0;
  std::size_t hits = 0;
  // Barrier walls depend only on the grid time; precompute them once instead
  // of evaluating the fractional powers on every path step.
  std::vector<double> wall_lo(times.size()), wall_hi(times.size()),
      wall_cap(times.size());
  std::vector<unsigned char> in_banana(times.size()), in_cap(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    in_banana[i] =
        t >= config.t_dagger - kTimeTol && t <= banana_hi + kTimeTol;
    in_cap[i] = t >= banana_hi - kTimeTol;
    if (in_banana[i]) {
      wall_lo[i] = sqrt2 * decoration_barrier(t, config.t_plus, false);
      wall_hi[i] = sqrt2 * decoration_barrier(t, config.t_plus, true);
    }
    if (in_cap[i])
      wall_cap[i] = sqrt2 * (t - config.t_plus +
                             std::pow(config.t_plus - t + cap_const, 1.0 / 50.0));
  }

  for (std::size_t r = 0; r < n_paths; ++r) {
    double y = y0;
    bool ok = !in_cap[0] || y <= wall_cap[0];
    if (ok && in_banana[0] && (y < wall_lo[0] || y > wall_hi[0])) ok = false;
    for (std::size_t i = 0; ok && i < steps; ++i) {
      y += (importance_sampling ? sqrt2 * dt : 0.0) + sqrt_dt * stream.normal();
      if (in_banana[i + 1] && (y < wall_lo[i + 1] || y > wall_hi[i + 1]))
        ok = false;
      if (ok && in_cap[i + 1] && y > wall_cap[i + 1]) ok = false;
    }
    double w = 0.0;
    if (ok && y >= y_floor) {
      ++hits;
      w = importance_sampling ? std::exp(-sqrt2 * (y - y0) + span) : 1.0;
    }
    sum += w;
    sum_sq += w * w;
  }
  const double np = static_cast<double>(n_paths);
  OneRayResult result;
  result.n_paths = n_paths;
  result.p_hat = sum / np;
  const double var = std::max(0.0, sum_sq / np - result.p_hat * result.p_hat);
  result.se = std::sqrt(var / np);
  result.hit_fraction = static_cast<double>(hits) / np;
  return result;
}

}  // namespace cbe
