#include "cbe/barriers.hpp"

#include <cmath>
#include <vector>

namespace cbe {

double harmonic_number(std::uint64_t k) {
  constexpr std::uint64_t kExactCap = 1000000;
  if (k > kExactCap) {
    const double kd = static_cast<double>(k);
    return std::log(kd) + kEulerGamma + 0.5 / kd;
  }
  static std::vector<double> cache{0.0};  // cache[j] = H_j
  if (k >= cache.size()) {
    cache.reserve(k + 1);
    for (std::uint64_t j = cache.size(); j <= k; ++j)
      cache.push_back(cache.back() + 1.0 / static_cast<double>(j));
  }
  return cache[k];
}

namespace {

double upper_all_value(std::uint64_t n, double k_arg) {
  if (n < 2) throw ConfigError("barrier_value: upper_All requires n >= 2");
  if (k_arg < 0.0 || std::floor(k_arg) != k_arg)
    throw ConfigError("barrier_value: upper_All takes an integer k >= 0");
  const auto k = static_cast<std::uint64_t>(k_arg);
  if (k > n) throw ConfigError("barrier_value: upper_All requires k <= n");
  const double hk = harmonic_number(k);
  const double hn = harmonic_number(n);
  const double ln = std::log(static_cast<double>(n));
  if (hk <= 0.5 * ln) return hk + std::pow(hk, 0.01);
  return hk + std::pow(hn - hk, 0.01) - 0.75 * ln;
}

double banana_value(std::uint64_t n, int p, bool upper, double t) {
  if (n < 3) throw ConfigError("barrier_value: banana requires n >= 3");
  if (p < 1) throw ConfigError("barrier_value: banana requires p >= 1");
  const double ln = std::log(static_cast<double>(n));
  if (t < 0.0 || t > ln)
    throw ConfigError("barrier_value: banana argument outside [0, log n]");
  const double q = static_cast<double>(p) / (2.0 * p + 1.0);
  const double expo = upper ? 0.5 - q : 0.5 + q;
  if (t <= 0.5 * ln) return t - std::pow(t, expo);
  return t - std::pow(ln - t, expo) - 0.75 * std::log(ln);
}

double envelope_value(std::uint64_t n_cap, bool upper, double k_arg) {
  if (n_cap < 2) throw ConfigError("barrier_value: envelope requires N >= 2");
  if (k_arg < 0.0 || std::floor(k_arg) != k_arg)
    throw ConfigError("barrier_value: envelope takes an integer k >= 0");
  const auto k = static_cast<std::uint64_t>(k_arg);
  if (k > n_cap) throw ConfigError("barrier_value: envelope requires k <= N");
  const double a = upper ? 0.1 : 0.9;
  const double nd = static_cast<double>(n_cap);
  if (k <= n_cap / 2) return -std::pow(static_cast<double>(k), a);
  return -std::pow(nd - static_cast<double>(k), a) - 0.75 * std::log(nd);
}

}  // namespace

double barrier_value(const BarrierSpec& spec, double t_or_k) {
  switch (spec.kind) {
    case BarrierKind::kUpperAll:
      return upper_all_value(spec.n, t_or_k);
    case BarrierKind::kBanana:
      return banana_value(spec.n, spec.p, spec.upper, t_or_k);
    case BarrierKind::kAppendixEnvelope:
      return envelope_value(spec.n, spec.upper, t_or_k);
  }
  throw ConfigError("barrier_value: unknown barrier kind");
}

}  // namespace cbe
