#pragma once

#include <cstddef>
#include <vector>

#include "cbe/common.hpp"

namespace cbe {

// Polynomial on the unit circle, coefficients in ascending powers.
struct CirclePoly {
  std::vector<cplx> coeffs;

  CirclePoly() = default;
  explicit CirclePoly(std::vector<cplx> c) : coeffs(std::move(c)) {}

  bool is_zero() const;
  // Index of the last nonzero coefficient; errors on the zero polynomial.
  std::size_t degree() const;
  CirclePoly derivative() const;
  cplx eval(cplx z) const;  // Horner
};

// max |Q'| on the circle vs. degree * max |Q|; the maxima come from a dense
// uniform grid (64 points per degree, at least 4096) refined by a local
// golden-section polish — a test oracle, not a certified global optimum.
struct BernsteinRatio {
  double max_derivative = 0.0;    // max_{|z|=1} |Q'(z)|
  double degree_times_max = 0.0;  // k * max_{|z|=1} |Q(z)|
  double ratio = 0.0;             // their quotient
};
BernsteinRatio bernstein_ratio(const CirclePoly& q);

// Fejer kernel F_m(z) = (1/m) |1 - z^m|^2 / |1 - z|^2 for |z| = 1, with the
// removable singularity F_m(1) = m; evaluated through the stable sine form.
double fejer_kernel(std::size_t m, cplx z);

// Residual |sum_{j=1}^{rm} F_m(e^{2 pi i (t + j/(rm))}) - rm| of the averaged
// Fejer sum identity.
double fejer_sum_identity(std::size_t m, std::size_t r, double t);

// |Q|^2 at the M-th roots of unity e^{2 pi i j / M}, j = 0..M-1, via the
// discrete Fourier transform of the zero-padded coefficients (radix-2 FFT for
// powers of two, direct transform otherwise).  Requires M >= degree + 1.
std::vector<double> eval_at_roots(const CirclePoly& q, std::size_t M);

// Interpolation brackets over the (2mk)-th roots of unity: the global bound
//   max_{|z|=1} |Q|^2 <= m/(m-1) * max over roots |Q|^2,
// and the near/far decomposition where the near set N holds the roots with
// |w - 1| <= 2b/k and the bounds on the arc |z - 1| <= b/k read
//   arc max <= m/(m-1) max_N + C/(b(m-1)) max_F,
//   arc min >= m/(m-1) min_N - (1 + C/b)/(m-1) * max over all roots.
// The absolute constant C is not asserted; the smallest value making each
// bound hold for this sample is reported so a corpus-level fit can be made.
struct InterpolationBrackets {
  std::size_t degree = 0;
  std::size_t m = 0;
  double b = 0.0;

  double roots_max = 0.0;    // max |Q|^2 over the 2mk roots
  double global_bound = 0.0; // m/(m-1) * roots_max, certified >= circle max
  double circle_max = 0.0;   // dense-grid circle maximum of |Q|^2 (oracle)

  double near_max = 0.0;
  double near_min = 0.0;
  double far_max = 0.0;      // 0 when the far set is empty
  bool far_empty = false;

  double arc_max = 0.0;      // oracle max of |Q|^2 on the arc |z-1| <= b/k
  double arc_min = 0.0;      // oracle min on the same arc

  double c_upper_fit = 0.0;  // smallest C validating the upper arc bound
  double c_lower_fit = 0.0;  // smallest C validating the lower arc bound
};
InterpolationBrackets interpolation_brackets(const CirclePoly& q,
                                             std::size_t m, double b);

}  // namespace cbe
