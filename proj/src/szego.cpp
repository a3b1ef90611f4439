#include "cbe/szego.hpp"

#include <cmath>
#include <complex>

namespace cbe {

namespace {
constexpr std::size_t kMaxSzegoDegree = 4096;
constexpr std::size_t kMaxRootDegree = 16;
}  // namespace

SzegoPair szego_coefficients(const std::vector<cplx>& gammas) {
  if (gammas.size() > kMaxSzegoDegree)
    throw ConfigError("szego_coefficients: degree cap exceeded");
  for (const cplx& g : gammas)
    if (std::abs(g) >= 1.0)
      throw ConfigError("szego_coefficients: coefficient modulus must be < 1");

  SzegoPair p;
  p.phi = {cplx(1.0, 0.0)};
  p.phi_star = {cplx(1.0, 0.0)};
  for (const cplx& g : gammas) {
    const std::size_t k = p.phi.size() - 1;  // current degree
    std::vector<cplx> phi_next(k + 2, cplx(0.0, 0.0));
    std::vector<cplx> star_next(k + 2, cplx(0.0, 0.0));
    for (std::size_t i = 0; i <= k; ++i) {
      phi_next[i + 1] += p.phi[i];                  // z * Phi_k
      phi_next[i] -= std::conj(g) * p.phi_star[i];  // - conj(gamma) * Phi*_k
      star_next[i + 1] -= g * p.phi[i];             // - gamma * z * Phi_k
      star_next[i] += p.phi_star[i];                // + Phi*_k
    }
    p.phi = std::move(phi_next);
    p.phi_star = std::move(star_next);
  }
  return p;
}

std::vector<cplx> char_poly_coefficients(const std::vector<cplx>& gammas,
                                         cplx alpha) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12)
    throw ConfigError("char_poly_coefficients: alpha must be unimodular");
  SzegoPair p = szego_coefficients(gammas);
  const std::size_t n = gammas.size() + 1;  // degree of X_n
  std::vector<cplx> x(n + 1, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < p.phi_star.size(); ++i) x[i] += p.phi_star[i];
  for (std::size_t i = 0; i < p.phi.size(); ++i) x[i + 1] -= alpha * p.phi[i];
  return x;
}

cplx horner_eval(const std::vector<cplx>& coeffs, cplx z) {
  CBE_CHECK(!coeffs.empty(), "horner_eval: empty coefficient vector");
  cplx acc = coeffs.back();
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * z + coeffs[i];
  return acc;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
  CBE_CHECK(coeffs.size() >= 2, "polynomial_roots: need degree >= 1");
  std::size_t deg = coeffs.size() - 1;
  while (deg > 0 && std::abs(coeffs[deg]) == 0.0) --deg;
  if (deg == 0) throw ConfigError("polynomial_roots: zero polynomial degree");
  if (deg > kMaxRootDegree)
    throw ConfigError("polynomial_roots: degree cap exceeded");

  std::vector<cplx> c(coeffs.begin(), coeffs.begin() + deg + 1);
  const cplx lead = c[deg];
  for (auto& v : c) v /= lead;

  // Initial guesses on a non-symmetric circle to break degeneracies.
  std::vector<cplx> r(deg);
  for (std::size_t i = 0; i < deg; ++i) {
    const double ang = kTwoPi * (static_cast<double>(i) + 0.25) /
                       static_cast<double>(deg) + 0.5;
    r[i] = 0.9 * std::polar(1.0, ang);
  }

  const int kIters = 200;
  const double kTol = 1e-12;
  for (int it = 0; it < kIters; ++it) {
    double worst = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      cplx num = horner_eval(c, r[i]);
      cplx den(1.0, 0.0);
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) den *= (r[i] - r[j]);
      if (std::abs(den) == 0.0) den = cplx(1e-300, 0.0);
      const cplx delta = num / den;
      r[i] -= delta;
      worst = std::max(worst, std::abs(delta));
    }
    if (worst < kTol) break;
  }
  return r;
}

}  // namespace cbe
