#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbe {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Thrown on invalid user-facing configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a numerical routine leaves its supported domain.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Always-on invariant check (independent of NDEBUG): these guard mathematical
// contracts, not programmer errors, so they must fire in release builds too.
#define CBE_CHECK(cond, msg)                                              \
  do {                                                                    \
    if (!(cond)) throw std::logic_error(std::string("invariant: ") + (msg)); \
  } while (0)

// Reduce an angle to [0, 2*pi).
inline double wrap_two_pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  // fmod of a slightly negative x can round to exactly 2*pi after the shift
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

// Arc (geodesic) distance on the circle of circumference 2*pi.
inline double arc_distance(double a, double b) {
  double d = std::abs(wrap_two_pi(a) - wrap_two_pi(b));
  return d <= kPi ? d : kTwoPi - d;
}

}  // namespace cbe
