#include "cbe/martingale.hpp"

#include <cmath>
#include <complex>

#include "cbe/special.hpp"

namespace cbe {

double s_beta(double beta) {
  if (beta <= 0.0) throw ConfigError("s_beta: beta must be positive");
  return std::sqrt(beta / 2.0);
}

double mgf(double s, double t, std::uint64_t j, double beta) {
  if (beta <= 0.0) throw ConfigError("mgf: beta must be positive");
  const double b = beta * (static_cast<double>(j) + 1.0) / 2.0;
  if (1.0 + s + b <= 0.0)
    throw ConfigError("mgf: pole of Gamma (need s > -1 - beta(j+1)/2)");
  const cplx num = log_gamma(cplx(1.0 + b, 0.0)) +
                   log_gamma(cplx(1.0 + s + b, 0.0));
  const cplx den = log_gamma(cplx(1.0 + b + s / 2.0, t / 2.0)) +
                   log_gamma(cplx(1.0 + b + s / 2.0, -t / 2.0));
  return std::exp((num - den).real());
}

double h_value(std::uint64_t k, double beta, double s) {
  return std::log(mgf(2.0 * s, 0.0, k, beta));
}

double h_prime(std::uint64_t k, double beta, double s) {
  // d/ds log mgf(2s, 0, k, beta)
  //   = 2 [digamma(1 + 2s + b) - digamma(1 + b + s)], b = beta(k+1)/2.
  const double b = beta * (static_cast<double>(k) + 1.0) / 2.0;
  return 2.0 * (digamma(1.0 + 2.0 * s + b) - digamma(1.0 + b + s));
}

double h_prime_central(std::uint64_t k, double beta, double s,
                       double rel_step) {
  const double h = rel_step * (std::abs(s) > 1.0 ? std::abs(s) : 1.0);
  return (h_value(k, beta, s + h) - h_value(k, beta, s - h)) / (2.0 * h);
}

NormalizerSums normalizer_sums(std::uint64_t j, double beta) {
  if (j < 2) throw ConfigError("normalizer_sums: requires j >= 2");
  const double s = s_beta(beta);
  NormalizerSums out;
  out.j = j;
  for (std::uint64_t k = 0; k < j; ++k) {
    out.sum_h += h_value(k, beta, s);
    out.sum_h_prime += h_prime(k, beta, s);
  }
  const double lj = std::log(static_cast<double>(j));
  out.g_estimate = out.sum_h - lj;
  out.h_estimate = out.sum_h_prime - std::sqrt(8.0 / beta) * lj;
  return out;
}

namespace {

bool is_power_of_two(std::uint64_t k) { return k != 0 && (k & (k - 1)) == 0; }

}  // namespace

std::vector<double> derivative_density(const std::vector<double>& phi,
                                       std::uint64_t k, double beta,
                                       bool strict_dyadic) {
  if (k < 2) throw ConfigError("derivative_density: requires k >= 2");
  if (strict_dyadic && !is_power_of_two(k))
    throw ConfigError("derivative_density: k must be a power of two");
  const double lk = std::log(static_cast<double>(k));
  const double sb = s_beta(beta);
  const double slope = std::sqrt(beta / 4.0);
  std::vector<double> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double lin = std::sqrt(2.0) * lk - slope * phi[i];
    out[i] = lin > 0.0
                 ? std::exp(sb * phi[i] - lk) * lin / kTwoPi
                 : 0.0;
  }
  return out;
}

double mesh_integral(const std::vector<double>& values, const Mesh& mesh) {
  CBE_CHECK(values.size() == mesh.size() && !values.empty(),
            "mesh_integral: size mismatch");
  CBE_CHECK(mesh.arc_begin.empty(), "mesh_integral: requires a uniform mesh");
  // Uniform periodic mesh: trapezoid coincides with the Riemann sum.
  const double pitch = kTwoPi / static_cast<double>(mesh.size());
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * pitch;
}

ProperMartingale proper_martingale(const std::vector<double>& phi,
                                   const Mesh& mesh, std::uint64_t j,
                                   double beta) {
  const NormalizerSums s = normalizer_sums(j, beta);
  const double sb = s_beta(beta);
  ProperMartingale out;
  out.d_hat.resize(phi.size());
  out.exp_mart.resize(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    out.exp_mart[i] = std::exp(sb * phi[i] - s.sum_h);
    out.d_hat[i] = out.exp_mart[i] * (s.sum_h_prime - phi[i]);
  }
  out.b_hat = mesh_integral(out.d_hat, mesh) / kTwoPi;
  return out;
}

TruncationMass truncation_mass(const std::vector<double>& phi, const Mesh& mesh,
                               std::uint64_t k, double beta, double eta) {
  if (eta <= 0.0 || eta >= 2.0)
    throw ConfigError("truncation_mass: eta must lie in (0, 2)");
  if (!is_power_of_two(k) || k < 2)
    throw ConfigError("truncation_mass: k must be a dyadic step >= 2");
  const double lk = std::log(static_cast<double>(k));
  const double sb = s_beta(beta);
  const double slope = std::sqrt(beta / 4.0);
  const double lo = eta / 2.0, hi = 2.0 / eta;
  std::vector<double> excluded(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double lin = std::sqrt(2.0) * lk - slope * phi[i];
    const double dev = lin / std::sqrt(lk);
    const bool inside = dev >= lo && dev <= hi;
    excluded[i] =
        inside ? 0.0 : std::exp(sb * phi[i] - lk) * std::abs(lin);
  }
  TruncationMass out;
  out.excluded = mesh_integral(excluded, mesh);
  out.total = mesh_integral(derivative_density(phi, k, beta, false), mesh);
  return out;
}

}  // namespace cbe
