#pragma once

#include <cstddef>
#include <vector>

#include "cbe/common.hpp"

namespace cbe {

// Coefficient-domain view of the orthogonal-polynomial recursion
//   Phi_{k+1}(z) = z Phi_k(z) - conj(gamma_k) Phi*_k(z)
//   Phi*_{k+1}(z) = -gamma_k z Phi_k(z) + Phi*_k(z)
// with Phi_0 = Phi*_0 = 1.  This is the slow O(k^2) ground truth used to
// cross-check the phase-domain recursion and to provide exact roots for
// small n.
struct SzegoPair {
  std::vector<cplx> phi;       // coefficients of Phi_k, ascending powers
  std::vector<cplx> phi_star;  // coefficients of Phi*_k, ascending powers
};

// Runs the coefficient recursion over all supplied coefficients.  Degree is
// capped (the quadratic cost makes large degrees unreasonable here).
SzegoPair szego_coefficients(const std::vector<cplx>& gammas);

// Coefficients (ascending) of X_n(z) = Phi*_{n-1}(z) - alpha z Phi_{n-1}(z),
// the characteristic polynomial scaled so X_n(0) = 1.  `gammas` must hold
// exactly n-1 coefficients and alpha must be unimodular.
std::vector<cplx> char_poly_coefficients(const std::vector<cplx>& gammas,
                                         cplx alpha);

// Horner evaluation of a polynomial given by ascending coefficients.
cplx horner_eval(const std::vector<cplx>& coeffs, cplx z);

// All roots by Durand-Kerner iteration.  Intended as a small-n oracle:
// degree is capped at 16; 200 iterations at tolerance 1e-12.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs);

}  // namespace cbe
