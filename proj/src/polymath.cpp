#include "cbe/polymath.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cbe {

namespace {

bool nonzero(const cplx& c) { return c.real() != 0.0 || c.imag() != 0.0; }

// Iterative radix-2 transform with positive-exponent convention,
// X_j = sum_k x_k e^{2 pi i j k / M}.
void fft_pow2(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = kTwoPi / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cplx u = a[i + j];
        const cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

double golden_extremum(const std::function<double(double)>& f, double lo,
                       double hi, bool maximize) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 120 && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++it) {
    const bool move_right = maximize ? (fc < fd) : (fc > fd);
    if (move_right) {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    }
  }
  const double mid = 0.5 * (a + b);
  double best = f(mid);
  for (double t : {lo, hi, c, d}) {
    const double v = f(t);
    best = maximize ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

// Dense-grid extremum of g(theta) on [lo, hi] with a golden-section polish in
// the winning cell and its neighbors.
double grid_extremum(const std::function<double(double)>& g, double lo,
                     double hi, std::size_t points, bool maximize) {
  double best = g(lo);
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < points; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(points - 1);
    const double v = g(t);
    if (maximize ? (v > best) : (v < best)) {
      best = v;
      best_i = i;
    }
  }
  const double cell = (hi - lo) / static_cast<double>(points - 1);
  const double a = std::max(lo, lo + cell * (static_cast<double>(best_i) - 1.0));
  const double b = std::min(hi, lo + cell * (static_cast<double>(best_i) + 1.0));
  const double polished = golden_extremum(g, a, b, maximize);
  return maximize ? std::max(best, polished) : std::min(best, polished);
}

// Circle maximum of |Q| via FFT values of |Q|^2 on a power-of-two grid plus
// local polish.
double circle_max_abs_sq(const CirclePoly& q) {
  const std::size_t k = q.degree();
  std::size_t target = std::max<std::size_t>(4096, 64 * (k + 1));
  std::size_t grid = 1;
  while (grid < target) grid <<= 1;
  const std::vector<double> vals = eval_at_roots(q, grid);
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < grid; ++i)
    if (vals[i] > vals[best_i]) best_i = i;
  const double pitch = kTwoPi / static_cast<double>(grid);
  const double center = pitch * static_cast<double>(best_i);
  const auto g = [&](double t) {
    return std::norm(q.eval(cplx(std::cos(t), std::sin(t))));
  };
  return std::max(vals[best_i], golden_extremum(g, center - pitch,
                                                center + pitch, true));
}

}  // namespace

bool CirclePoly::is_zero() const {
  for (const cplx& c : coeffs)
    if (nonzero(c)) return false;
  return true;
}

std::size_t CirclePoly::degree() const {
  for (std::size_t i = coeffs.size(); i-- > 0;)
    if (nonzero(coeffs[i])) return i;
  throw ConfigError("circle polynomial: zero polynomial has no degree");
}

CirclePoly CirclePoly::derivative() const {
  if (coeffs.size() <= 1) return CirclePoly({cplx(0.0, 0.0)});
  std::vector<cplx> d(coeffs.size() - 1);
  for (std::size_t i = 1; i < coeffs.size(); ++i)
    d[i - 1] = coeffs[i] * static_cast<double>(i);
  return CirclePoly(std::move(d));
}

cplx CirclePoly::eval(cplx z) const {
  cplx acc(0.0, 0.0);
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
  return acc;
}

BernsteinRatio bernstein_ratio(const CirclePoly& q) {
  if (q.is_zero()) throw ConfigError("bernstein ratio: zero polynomial");
  const std::size_t k = q.degree();
  if (k < 1) throw ConfigError("bernstein ratio: degree must be at least 1");
  BernsteinRatio out;
  out.max_derivative = std::sqrt(circle_max_abs_sq(q.derivative()));
  out.degree_times_max =
      static_cast<double>(k) * std::sqrt(circle_max_abs_sq(q));
  out.ratio = out.max_derivative / out.degree_times_max;
  return out;
}

double fejer_kernel(std::size_t m, cplx z) {
  if (m == 0) throw ConfigError("fejer kernel: m must be at least 1");
  if (std::abs(std::abs(z) - 1.0) > 1e-9)
    throw ConfigError("fejer kernel: z must lie on the unit circle");
  const double theta = std::arg(z);
  const double s = std::sin(0.5 * theta);
  if (std::abs(s) < 1e-12) return static_cast<double>(m);
  const double sm = std::sin(0.5 * static_cast<double>(m) * theta);
  const double ratio = sm / s;
  return ratio * ratio / static_cast<double>(m);
}

double fejer_sum_identity(std::size_t m, std::size_t r, double t) {
  if (m == 0 || r == 0)
    throw ConfigError("fejer sum identity: m and r must be at least 1");
  const double rm = static_cast<double>(r) * static_cast<double>(m);
  double sum = 0.0;
  for (std::size_t j = 1; j <= r * m; ++j) {
    const double x = t + static_cast<double>(j) / rm;
    sum += fejer_kernel(m, cplx(std::cos(kTwoPi * x), std::sin(kTwoPi * x)));
  }
  return std::abs(sum - rm);
}

std::vector<double> eval_at_roots(const CirclePoly& q, std::size_t M) {
  const std::size_t k = q.is_zero() ? 0 : q.degree();
  if (M < k + 1)
    throw ConfigError("eval at roots: M must be at least degree + 1");
  if ((M & (M - 1)) == 0) {
    std::vector<cplx> a(M, cplx(0.0, 0.0));
    for (std::size_t i = 0; i <= k && i < q.coeffs.size(); ++i)
      a[i] = q.coeffs[i];
    fft_pow2(a);
    std::vector<double> out(M);
    for (std::size_t i = 0; i < M; ++i) out[i] = std::norm(a[i]);
    return out;
  }
  std::vector<double> out(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double ang = kTwoPi * static_cast<double>(j) / static_cast<double>(M);
    out[j] = std::norm(q.eval(cplx(std::cos(ang), std::sin(ang))));
  }
  return out;
}

InterpolationBrackets interpolation_brackets(const CirclePoly& q,
                                             std::size_t m, double b) {
  if (m < 2) throw ConfigError("interpolation brackets: m must be at least 2");
  if (!(b > 0.0)) throw ConfigError("interpolation brackets: b must be positive");
  if (q.is_zero()) throw ConfigError("interpolation brackets: zero polynomial");

  InterpolationBrackets out;
  out.degree = q.degree();
  out.m = m;
  out.b = b;
  const double k = static_cast<double>(out.degree);
  const std::size_t M = 2 * m * std::max<std::size_t>(out.degree, 1);
  const std::vector<double> vals = eval_at_roots(q, M);
  const double factor = static_cast<double>(m) / (static_cast<double>(m) - 1.0);

  const double near_chord = 2.0 * b / std::max(k, 1.0);
  bool have_far = false, have_near = false;
  for (std::size_t j = 0; j < M; ++j) {
    out.roots_max = std::max(out.roots_max, vals[j]);
    const double chord =
        2.0 * std::abs(std::sin(kPi * static_cast<double>(j) /
                                static_cast<double>(M)));
    if (chord <= near_chord) {
      if (!have_near) {
        out.near_max = vals[j];
        out.near_min = vals[j];
        have_near = true;
      } else {
        out.near_max = std::max(out.near_max, vals[j]);
        out.near_min = std::min(out.near_min, vals[j]);
      }
    } else {
      out.far_max = std::max(out.far_max, vals[j]);
      have_far = true;
    }
  }
  out.far_empty = !have_far;
  out.global_bound = factor * out.roots_max;
  out.circle_max = circle_max_abs_sq(q);

  // Oracle extrema of |Q|^2 on the arc |z - 1| <= b/k.
  const double half_chord = std::min(1.0, b / (2.0 * std::max(k, 1.0)));
  const double theta_b = 2.0 * std::asin(half_chord);
  const auto g = [&](double t) {
    return std::norm(q.eval(cplx(std::cos(t), std::sin(t))));
  };
  out.arc_max = grid_extremum(g, -theta_b, theta_b, 8193, true);
  out.arc_min = grid_extremum(g, -theta_b, theta_b, 8193, false);

  const double m1 = static_cast<double>(m) - 1.0;
  if (!out.far_empty && out.far_max > 0.0) {
    const double slack = out.arc_max - factor * out.near_max;
    out.c_upper_fit = std::max(0.0, slack * b * m1 / out.far_max);
  }
  if (out.roots_max > 0.0) {
    const double need = (factor * out.near_min - out.arc_min) * m1 / out.roots_max;
    out.c_lower_fit = std::max(0.0, b * (need - 1.0));
  }
  return out;
}

}  // namespace cbe
