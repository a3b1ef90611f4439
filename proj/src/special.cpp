#include "cbe/special.hpp"

#include <cmath>

#include "cbe/quadrature.hpp"

namespace cbe {

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

cplx log_gamma_core(cplx z) {
  // Requires Re z >= 0.5.
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  cplx t = z + kLanczosG + 0.5;
  return (z + 0.5) * std::log(t) - t + std::log(std::sqrt(kTwoPi) * x);
}

}  // namespace

cplx log_gamma(cplx z) {
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    cplx s = std::sin(kPi * z);
    if (s == cplx(0.0, 0.0)) throw NumericError("log_gamma: pole at nonpositive integer");
    return std::log(kPi) - std::log(s) - log_gamma_core(1.0 - z);
  }
  return log_gamma_core(z);
}

double digamma(double x) {
  if (!(x > 0.0)) throw NumericError("digamma: requires x > 0");
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x, inv2 = inv * inv;
  // log x - 1/(2x) - sum B_{2n} / (2n x^{2n})
  double series = std::log(x) - 0.5 * inv -
                  inv2 * (1.0 / 12.0 +
                          inv2 * (-1.0 / 120.0 +
                                  inv2 * (1.0 / 252.0 +
                                          inv2 * (-1.0 / 240.0 + inv2 * (1.0 / 132.0)))));
  return acc + series;
}

double bessel_k0(double x) {
  if (!(x > 0.0)) throw NumericError("bessel_k0: requires x > 0");
  if (x > 705.0) return 0.0;  // exp(-x) underflows; K0 < 1e-306
  // Truncate where the integrand has fallen by e^{-45} relative to t = 0.
  double cap = 1.0 + 45.0 / x;
  double t_max = std::acosh(cap);
  // Factor out exp(-x) so the adaptive tolerance is relative to the peak.
  auto scaled = [x](double t) { return std::exp(-x * (std::cosh(t) - 1.0)); };
  double val = integrate_adaptive_rel(scaled, 0.0, t_max, 1e-11);
  return val * std::exp(-x);
}

double bessel_k0_series(double x) {
  if (!(x > 0.0)) throw NumericError("bessel_k0_series: requires x > 0");
  // K0(x) = -(log(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 * H_k
  double q = 0.25 * x * x;
  double term = 1.0;       // (x^2/4)^k / (k!)^2 at k = 0
  double i0 = 1.0;
  double h = 0.0;          // harmonic number H_k
  double hsum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    h += 1.0 / k;
    i0 += term;
    hsum += term * h;
    if (term * (1.0 + h) < 1e-18 * (std::abs(i0) + std::abs(hsum))) break;
  }
  return -(std::log(0.5 * x) + kEulerGamma) * i0 + hsum;
}

double bessel_k0_asymptotic(double x) {
  if (!(x > 0.0)) throw NumericError("bessel_k0_asymptotic: requires x > 0");
  // K0(x) ~ sqrt(pi/(2x)) e^{-x} sum_k t_k,  t_0 = 1,
  // t_k = -t_{k-1} (2k-1)^2 / (8 x k); sum to the smallest term.
  double term = 1.0, sum = 1.0;
  double prev = std::abs(term);
  for (int k = 1; k <= 60; ++k) {
    double odd = 2.0 * k - 1.0;
    term *= -(odd * odd) / (8.0 * x * k);
    if (std::abs(term) >= prev) break;  // divergent tail reached
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * sum;
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw NumericError("regularized_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // Series: P(a,x) = x^a e^{-x} / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n))
    double ap = a, term = 1.0 / a, sum = term;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Continued fraction for Q(a,x) (modified Lentz).
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

double chi_square_pvalue(double stat, double dof) {
  if (stat <= 0.0) return 1.0;
  return 1.0 - regularized_gamma_p(0.5 * dof, 0.5 * stat);
}

}  // namespace cbe
