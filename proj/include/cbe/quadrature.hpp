#pragma once

#include <cmath>
#include <cstddef>

#include "cbe/common.hpp"

namespace cbe {

namespace detail {

template <typename F>
double simpson_adapt(const F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double h6 = (b - a) / 12.0;
  double left = h6 * (fa + 4.0 * flm + fm);
  double right = h6 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b] to absolute tolerance tol.
template <typename F>
double integrate_adaptive(const F& f, double a, double b, double tol, int max_depth = 48) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Adaptive Simpson with a relative target: a coarse pass sets the scale.
template <typename F>
double integrate_adaptive_rel(const F& f, double a, double b, double rel_tol,
                              int max_depth = 48) {
  double scale = 0.0;
  const int kCoarse = 64;
  double h = (b - a) / kCoarse;
  for (int i = 0; i <= kCoarse; ++i) scale += std::abs(f(a + i * h)) * std::abs(h);
  if (scale == 0.0) scale = 1.0;
  return integrate_adaptive(f, a, b, rel_tol * scale, max_depth);
}

// Trapezoid quadrature of samples on a uniform periodic mesh over [0, 2*pi):
// with equal spacing and periodic integrand this is the plain Riemann sum.
inline double trapezoid_periodic(const double* values, std::size_t count, double spacing) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += values[i];
  return s * spacing;
}

}  // namespace cbe
