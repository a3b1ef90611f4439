#include "cbe/limitlaws.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "cbe/quadrature.hpp"
#include "cbe/special.hpp"
#include "cbe/stats.hpp"

namespace cbe {

double fhk_density(double x) {
  if (!std::isfinite(x)) throw ConfigError("fhk density: argument must be finite");
  if (x > 30.0) return 0.0;  // K_0(2 e^x) underflows long before this point
  const double z = 2.0 * std::exp(x);
  const double k0 = bessel_k0(z);
  return 4.0 * std::exp(2.0 * x) * k0;
}

namespace {

constexpr double kCdfLo = -40.0;
constexpr double kCdfHi = 15.0;
constexpr std::size_t kCdfCells = 5500;

// Cumulative quadrature table for the fhk CDF, built once.
const std::vector<double>& fhk_cdf_table() {
  static std::vector<double> table;
  static std::once_flag flag;
  std::call_once(flag, [] {
    table.resize(kCdfCells + 1);
    table[0] = 0.0;  // mass below kCdfLo is ~1e-33
    const double h = (kCdfHi - kCdfLo) / static_cast<double>(kCdfCells);
    double acc = 0.0;
    for (std::size_t i = 0; i < kCdfCells; ++i) {
      const double a = kCdfLo + h * static_cast<double>(i);
      acc += integrate_adaptive([](double t) { return fhk_density(t); }, a,
                                a + h, 1e-12);
      table[i + 1] = acc;
    }
  });
  return table;
}

double gumbel_cdf(double x, double scale) {
  return std::exp(-std::exp(-x / scale));
}

}  // namespace

double fhk_cdf(double x) {
  const std::vector<double>& table = fhk_cdf_table();
  if (x <= kCdfLo) return 0.0;
  if (x >= kCdfHi) return std::min(1.0, table.back());
  const double h = (kCdfHi - kCdfLo) / static_cast<double>(kCdfCells);
  const double pos = (x - kCdfLo) / h;
  const auto cell = std::min(kCdfCells - 1, static_cast<std::size_t>(pos));
  const double w = pos - static_cast<double>(cell);
  const double value = table[cell] * (1.0 - w) + table[cell + 1] * w;
  return std::min(1.0, std::max(0.0, value));
}

double sample_gumbel(double scale, RngStream& stream) {
  if (!(scale > 0.0)) throw ConfigError("gumbel sampler: scale must be positive");
  const double u = 1.0 - stream.uniform01();  // (0, 1]
  return -scale * std::log(-std::log(u));
}

double sample_two_gumbel_sum(RngStream& stream) {
  return sample_gumbel(1.0, stream) + sample_gumbel(1.0, stream);
}

LimitLaw LimitLaw::fhk() {
  LimitLaw law;
  law.kind = LawKind::kFhk;
  return law;
}

LimitLaw LimitLaw::gumbel(double scale) {
  if (!(scale > 0.0)) throw ConfigError("limit law: gumbel scale must be positive");
  LimitLaw law;
  law.kind = LawKind::kGumbel;
  law.scale = scale;
  return law;
}

LimitLaw LimitLaw::two_gumbel_sum() {
  LimitLaw law;
  law.kind = LawKind::kTwoGumbelSum;
  return law;
}

LimitLaw LimitLaw::shifted_gumbel(double scale, double shift) {
  LimitLaw law = gumbel(scale);
  law.kind = LawKind::kShiftedGumbel;
  law.shift = shift;
  return law;
}

double LimitLaw::density(double x) const {
  switch (kind) {
    case LawKind::kFhk:
      return fhk_density(x);
    case LawKind::kTwoGumbelSum:
      // S = G1 + G2 equals -2Y for Y with the Bessel density, so the
      // quadrature route transfers by change of variables.
      return 0.5 * fhk_density(-0.5 * x);
    case LawKind::kGumbel: {
      const double t = x / scale;
      return std::exp(-t - std::exp(-t)) / scale;
    }
    case LawKind::kShiftedGumbel: {
      const double t = (x - shift) / scale;
      return std::exp(-t - std::exp(-t)) / scale;
    }
  }
  throw ConfigError("limit law: unknown kind");
}

double LimitLaw::cdf(double x) const {
  switch (kind) {
    case LawKind::kFhk:
      return fhk_cdf(x);
    case LawKind::kTwoGumbelSum:
      return 1.0 - fhk_cdf(-0.5 * x);
    case LawKind::kGumbel:
      return gumbel_cdf(x, scale);
    case LawKind::kShiftedGumbel:
      return gumbel_cdf(x - shift, scale);
  }
  throw ConfigError("limit law: unknown kind");
}

double LimitLaw::sample(RngStream& stream) const {
  switch (kind) {
    case LawKind::kFhk:
      // Additive representation -(G1+G2)/2; the density/CDF route stays a
      // deliberately independent quadrature so equality in law is testable.
      // (Moment check: E e^{sY} = Gamma(1+s/2)^2 both ways.)
      return -0.5 * sample_two_gumbel_sum(stream);
    case LawKind::kTwoGumbelSum:
      return sample_two_gumbel_sum(stream);
    case LawKind::kGumbel:
      return sample_gumbel(scale, stream);
    case LawKind::kShiftedGumbel:
      return shift + sample_gumbel(scale, stream);
  }
  throw ConfigError("limit law: unknown kind");
}

GofResult gof(const std::vector<double>& samples, const LimitLaw& law,
              RngStream& stream, std::size_t n_boot) {
  if (samples.size() < 100)
    throw ConfigError("goodness of fit: need at least 100 samples");
  const auto cdf = [&law](double x) { return law.cdf(x); };
  GofResult out;
  out.ks = ks_statistic(samples, cdf);
  out.ad = anderson_darling(samples, cdf);
  out.n_boot = n_boot;
  if (n_boot == 0) {
    out.p_value = -1.0;
    return out;
  }
  std::size_t at_least = 0;
  std::vector<double> boot(samples.size());
  for (std::size_t b = 0; b < n_boot; ++b) {
    for (double& x : boot) x = law.sample(stream);
    if (ks_statistic(boot, cdf) >= out.ks) ++at_least;
  }
  // add-one smoothing keeps the p-value away from an exact 0
  out.p_value = (static_cast<double>(at_least) + 1.0) /
                (static_cast<double>(n_boot) + 1.0);
  return out;
}

}  // namespace cbe
