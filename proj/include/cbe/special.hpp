#pragma once

#include "cbe/common.hpp"

namespace cbe {

// Principal-branch log Gamma for complex argument (Lanczos approximation,
// g = 7, 9 coefficients; reflection for Re z < 0.5).  Relative accuracy is
// about 1e-13 over the arguments used here.
cplx log_gamma(cplx z);

// Digamma for real positive argument: recurrence to x >= 6, then the
// asymptotic Bernoulli series.
double digamma(double x);

// Modified Bessel K0 by adaptive quadrature of the integral representation
// int_0^inf exp(-x cosh t) dt, relative tolerance 1e-10.  Underflows to 0 for
// x beyond the representable range of exp(-x).
double bessel_k0(double x);

// Power-series evaluation of K0 (small arguments) used as an independent
// cross-check of the quadrature route.
double bessel_k0_series(double x);

// Large-argument asymptotic series sqrt(pi/(2x)) e^{-x} (1 - 1/(8x) + ...)
// summed to its smallest term; the second cross-check route.
double bessel_k0_asymptotic(double x);

// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
double regularized_gamma_p(double a, double x);

// Chi-square upper tail probability with dof degrees of freedom.
double chi_square_pvalue(double stat, double dof);

}  // namespace cbe
