#include "cbe/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbe {

namespace {

// Minimum-cost perfect assignment via shortest augmenting paths with
// potentials; returns the total cost of an optimal pairing.
double hungarian_min_cost(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::size_t j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double cost = 0.0;
  for (std::size_t j = 1; j <= n; ++j) cost += a[p[j] - 1][j - 1];
  return cost;
}

// Augmenting-path step of the bipartite matching used by the bottleneck
// search: rows are matched to columns along edges with cost <= threshold.
bool kuhn_augment(std::size_t row, const std::vector<std::vector<double>>& a,
                  double threshold, std::vector<char>& visited,
                  std::vector<long long>& match_col) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (visited[j] || a[row][j] > threshold) continue;
    visited[j] = 1;
    if (match_col[j] < 0 ||
        kuhn_augment(static_cast<std::size_t>(match_col[j]), a, threshold,
                     visited, match_col)) {
      match_col[j] = static_cast<long long>(row);
      return true;
    }
  }
  return false;
}

bool perfect_matching_exists(const std::vector<std::vector<double>>& a,
                             double threshold) {
  const std::size_t n = a.size();
  std::vector<long long> match_col(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<char> visited(n, 0);
    if (!kuhn_augment(i, a, threshold, visited, match_col)) return false;
  }
  return true;
}

double bottleneck_cost(const std::vector<std::vector<double>>& a) {
  std::vector<double> costs;
  costs.reserve(a.size() * a.size());
  for (const auto& row : a) costs.insert(costs.end(), row.begin(), row.end());
  std::sort(costs.begin(), costs.end());
  costs.erase(std::unique(costs.begin(), costs.end()), costs.end());
  std::size_t lo = 0, hi = costs.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (perfect_matching_exists(a, costs[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return costs[lo];
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double decoration_sup_gap(const MarkedPoint& p, cplx c) {
  double sup = 0.0;
  for (const cplx& value : p.f) sup = std::max(sup, std::abs(value - c));
  return sup;
}

}  // namespace

double dist_point(const MarkedPoint& a, const MarkedPoint& b) {
  if (a.f.size() != b.f.size())
    throw ConfigError("point distance: decorations live on mismatched windows");
  double sup = 0.0;
  for (std::size_t i = 0; i < a.f.size(); ++i)
    sup = std::max(sup, std::abs(a.f[i] - b.f[i]));
  const double d = arc_distance(a.theta, b.theta) + std::abs(a.v - b.v) + sup;
  return std::min(1.0, d);
}

std::pair<double, double> dist_config(const PointConfiguration& x,
                                      const PointConfiguration& y) {
  if (x.empty() && y.empty()) return {0.0, 0.0};
  if (x.size() != y.size()) return {1.0, 1.0};
  const std::size_t n = x.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i][j] = dist_point(x.points[i], y.points[j]);
  const double bottleneck = bottleneck_cost(cost);
  const double average = hungarian_min_cost(cost) / static_cast<double>(n);
  return {bottleneck, average};
}

ProcessDistanceEstimate dist_process_estimate(const ConfigurationSampler& p,
                                              const ConfigurationSampler& q,
                                              std::size_t n_pairs,
                                              RngStream& stream,
                                              bool shared_randomness) {
  if (!p || !q)
    throw ConfigError("process distance: both samplers must be provided");
  if (n_pairs == 0)
    throw ConfigError("process distance: need at least one pair");
  double sum_b = 0.0, sum_b2 = 0.0, sum_a = 0.0, sum_a2 = 0.0;
  for (std::size_t r = 0; r < n_pairs; ++r) {
    const std::uint64_t seed = stream.next_u64();
    RngStream sp = new_stream(seed, 1);
    RngStream sq =
        shared_randomness ? new_stream(seed, 1) : new_stream(stream.next_u64(), 2);
    const PointConfiguration xp = p(sp);
    const PointConfiguration xq = q(sq);
    const auto [b, a] = dist_config(xp, xq);
    sum_b += b;
    sum_b2 += b * b;
    sum_a += a;
    sum_a2 += a * a;
  }
  const double np = static_cast<double>(n_pairs);
  ProcessDistanceEstimate out;
  out.n_pairs = n_pairs;
  out.coupling = shared_randomness ? "shared-randomness" : "independent";
  out.bottleneck_mean = sum_b / np;
  out.average_mean = sum_a / np;
  out.bottleneck_se = std::sqrt(
      std::max(0.0, sum_b2 / np - out.bottleneck_mean * out.bottleneck_mean) / np);
  out.average_se = std::sqrt(
      std::max(0.0, sum_a2 / np - out.average_mean * out.average_mean) / np);
  return out;
}

double WeightedPointMeasure::total_mass() const {
  double mass = 0.0;
  for (double w : weights) mass += w;
  return mass;
}

std::vector<BlTestFunction> standard_bl_dictionary() {
  std::vector<BlTestFunction> theta_family, v_family, f_family;
  for (int j = 0; j < 64; ++j) {
    const double center = kTwoPi * static_cast<double>(j) / 64.0;
    theta_family.push_back([center](const MarkedPoint& p) {
      return std::max(0.0, 1.0 - arc_distance(p.theta, center));
    });
  }
  for (int j = 0; j < 32; ++j) {
    const double center = -4.0 + 8.0 * static_cast<double>(j) / 31.0;
    v_family.push_back([center](const MarkedPoint& p) {
      return clamp01(1.0 - std::abs(p.v - center));
    });
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const cplx c(-0.75 + 0.5 * a, -0.75 + 0.5 * b);
      f_family.push_back([c](const MarkedPoint& p) {
        return clamp01(decoration_sup_gap(p, c));
      });
    }
  }

  std::vector<BlTestFunction> dictionary;
  for (const auto& fam : {theta_family, v_family, f_family})
    dictionary.insert(dictionary.end(), fam.begin(), fam.end());
  const auto add_products = [&dictionary](
                                const std::vector<BlTestFunction>& lhs,
                                const std::vector<BlTestFunction>& rhs) {
    for (const auto& f : lhs)
      for (const auto& g : rhs)
        dictionary.push_back([f, g](const MarkedPoint& p) {
          return 0.5 * f(p) * g(p);  // halved to restore the Lipschitz bound
        });
  };
  add_products(theta_family, v_family);
  add_products(theta_family, f_family);
  add_products(v_family, f_family);
  return dictionary;
}

BlEstimate d_bl(const WeightedPointMeasure& mu, const WeightedPointMeasure& nu,
                const std::vector<BlTestFunction>& dictionary) {
  if (mu.atoms.size() != mu.weights.size() ||
      nu.atoms.size() != nu.weights.size())
    throw ConfigError("bounded-Lipschitz distance: atoms/weights size mismatch");
  if (dictionary.empty())
    throw ConfigError("bounded-Lipschitz distance: empty dictionary");
  BlEstimate out;
  out.dictionary_size = dictionary.size();
  for (std::size_t k = 0; k < dictionary.size(); ++k) {
    double integral = 0.0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i)
      integral += mu.weights[i] * dictionary[k](mu.atoms[i]);
    for (std::size_t i = 0; i < nu.atoms.size(); ++i)
      integral -= nu.weights[i] * dictionary[k](nu.atoms[i]);
    const double value = std::abs(integral);
    if (value > out.value) {
      out.value = value;
      out.best_index = k;
    }
  }
  return out;
}

PointConfiguration sample_poisson(const FiniteIntensity& intensity,
                                  RngStream& stream) {
  PointConfiguration config;
  if (intensity.total_mass <= 0.0) return config;
  if (!std::isfinite(intensity.total_mass))
    throw ConfigError("poisson sampler: total mass must be finite");
  if (!intensity.sampler)
    throw ConfigError("poisson sampler: missing point sampler");
  const std::uint64_t count = sample_poisson_count(stream, intensity.total_mass);
  config.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i)
    config.points.push_back(intensity.sampler(stream));
  return config;
}

double pp_bound(const std::vector<LocalMoments>& groups, double variance,
                double lambda, double c) {
  double sum = 0.0;
  for (const LocalMoments& g : groups) {
    if (!(g.l > 0.0))
      throw ConfigError("poisson approximation bound: group scale must be positive");
    sum += (g.e_p * g.e_t + g.e_tp + g.e_p * g.e_p) / (g.l * g.l);
  }
  return c * std::pow(variance + 3.0 * lambda, 1.5) * sum;
}

IntensityChangeBound intensity_change_bound(double d_bl_value, double mass_pi,
                                            double mass_lambda) {
  if (mass_pi < 0.0 || mass_lambda < 0.0)
    throw ConfigError("intensity change bound: masses must be nonnegative");
  if (d_bl_value < 0.0)
    throw ConfigError("intensity change bound: distance must be nonnegative");
  const double alpha = std::min(mass_pi, mass_lambda);
  IntensityChangeBound out;
  out.factor = alpha > 0.0 ? -std::expm1(-alpha) / alpha : 1.0;
  out.average_bound = out.factor * d_bl_value;
  out.bottleneck_bound =
      std::sqrt(2.0) * std::max(mass_pi, mass_lambda) * out.factor * d_bl_value;
  return out;
}

WrappedGaussianTv wrapped_gaussian_tv(double v, std::size_t n_samples,
                                      RngStream& stream, double alpha,
                                      std::size_t bins) {
  if (!(v > 0.0))
    throw ConfigError("wrapped gaussian: variance must be positive");
  if (n_samples == 0 || bins == 0)
    throw ConfigError("wrapped gaussian: need samples and bins");
  const double sd = std::sqrt(v);
  std::vector<std::size_t> counts(bins, 0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    double x = std::fmod(alpha + sd * stream.normal(), 1.0);
    if (x < 0.0) x += 1.0;
    const auto b = std::min(bins - 1,
                            static_cast<std::size_t>(x * static_cast<double>(bins)));
    ++counts[b];
  }
  const double u = 1.0 / static_cast<double>(bins);
  const double n = static_cast<double>(n_samples);
  WrappedGaussianTv out;
  out.bins = bins;
  out.n_samples = n_samples;
  double var_sum = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double p_hat = static_cast<double>(counts[b]) / n;
    out.tv += 0.5 * std::abs(p_hat - u);
    var_sum += p_hat * (1.0 - p_hat) / n;
  }
  out.se = 0.5 * std::sqrt(var_sum);
  return out;
}

}  // namespace cbe
