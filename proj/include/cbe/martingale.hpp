#pragma once

#include <cstdint>
#include <vector>

#include "cbe/common.hpp"
#include "cbe/mesh.hpp"

namespace cbe {

// Tilt parameter of the derivative martingale: s_beta = sqrt(beta/2).
double s_beta(double beta);

// Moment generating function of the per-step field increment:
//   mgf(s, t, j, beta) = Gamma(1 + b) Gamma(1 + s + b)
//                        / (Gamma(1 + b + (s+it)/2) Gamma(1 + b + (s-it)/2)),
// with b = beta (j+1)/2.  For real s, t the denominator factors are
// conjugate so the value is real; evaluated through log-Gamma.
// mgf(s, 0, j, beta) = E|1 - gamma_j|^s.
double mgf(double s, double t, std::uint64_t j, double beta);

// H_j(s) = log mgf(2s, 0, j, beta), the per-step normalizer exponent, and
// its s-derivative.  h_prime uses the digamma closed form; the central
// finite difference (relative step 1e-6) is exposed for cross-checking.
double h_value(std::uint64_t k, double beta, double s);
double h_prime(std::uint64_t k, double beta, double s);
double h_prime_central(std::uint64_t k, double beta, double s,
                       double rel_step = 1e-6);

// Partial sums of the normalizers at s = s_beta up to j (exclusive), with
// their regularized versions (the bounded remainders after removing the
// logarithmic growth).
struct NormalizerSums {
  std::uint64_t j = 0;
  double sum_h = 0.0;         // sum_{k=0}^{j-1} H_k(s_beta)
  double sum_h_prime = 0.0;   // sum_{k=0}^{j-1} H'_k(s_beta)
  double g_estimate = 0.0;    // sum_h - log j
  double h_estimate = 0.0;    // sum_h_prime - sqrt(8/beta) log j
};

NormalizerSums normalizer_sums(std::uint64_t j, double beta);

// Derivative-martingale density over a mesh snapshot of phi_k:
//   D_k(theta) = (1/2pi) e^{sqrt(beta/2) phi - log k}
//                (sqrt(2) log k - sqrt(beta/4) phi)_+ .
// Strict mode (default) insists k is a power of two, k >= 2.
std::vector<double> derivative_density(const std::vector<double>& phi,
                                       std::uint64_t k, double beta,
                                       bool strict_dyadic = true);

// Integral over [0, 2pi) of a mesh function (trapezoid on the uniform mesh).
double mesh_integral(const std::vector<double>& values, const Mesh& mesh);

// Proper martingale variant: the exponential martingale M_j, the density
//   D_hat_j(theta) = e^{s_beta phi - sum H}(sum H' - phi),
// and B_hat_j = (1/2pi) Integral D_hat_j.
struct ProperMartingale {
  std::vector<double> d_hat;
  std::vector<double> exp_mart;  // M_j(theta) = e^{s_beta phi - sum H}
  double b_hat = 0.0;
};

ProperMartingale proper_martingale(const std::vector<double>& phi,
                                   const Mesh& mesh, std::uint64_t j,
                                   double beta);

// Mass excluded by the compact-window truncation: integrand
//   e^{sqrt(beta/2) phi - log k} |sqrt(2) log k - sqrt(beta/4) phi|
// restricted to normalized deviations (.../sqrt(log k)) outside
// K = [eta/2, 2/eta].  total is B_k for reference.
struct TruncationMass {
  double excluded = 0.0;
  double total = 0.0;
};

TruncationMass truncation_mass(const std::vector<double>& phi, const Mesh& mesh,
                               std::uint64_t k, double beta, double eta);

}  // namespace cbe
