#include "cbe/mesh.hpp"

#include <cmath>

namespace cbe {

Mesh Mesh::uniform(std::size_t count) {
  if (count == 0) throw ConfigError("mesh: count must be positive");
  Mesh m;
  m.theta.resize(count);
  const double pitch = kTwoPi / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i)
    m.theta[i] = pitch * static_cast<double>(i);
  m.validate();
  return m;
}

Mesh Mesh::arcs(std::uint64_t n, std::uint64_t k1, std::uint64_t k5,
                double trim) {
  if (n == 0 || k1 == 0 || k5 == 0)
    throw ConfigError("mesh: n, k1, k5 must be positive");
  if (k1 > n) throw ConfigError("mesh: k1 must not exceed n");
  if (trim < 0.0) throw ConfigError("mesh: trim must be nonnegative");
  const double arc_width = kTwoPi * static_cast<double>(k1) / static_cast<double>(n);
  if (2.0 * trim >= arc_width && trim > 0.0)
    throw ConfigError("mesh: trim leaves arcs empty");

  const std::uint64_t arcs_total = (n + k1 - 1) / k1;  // ceil(n/k1)
  const double pitch = kTwoPi / (4.0 * static_cast<double>(k5) * static_cast<double>(n));
  Mesh m;
  m.arc_begin.reserve(arcs_total + 1);
  m.arc_lo.reserve(arcs_total);
  m.arc_hi.reserve(arcs_total);
  m.arc_begin.push_back(0);

  // Lattice indices: theta = pitch * q for integer q.  Arc boundaries land on
  // lattice points because each arc spans exactly 4*k5*k1 pitches.
  const std::uint64_t per_arc = 4 * k5 * k1;
  for (std::uint64_t j = 0; j < arcs_total; ++j) {
    const double lo = pitch * static_cast<double>(per_arc * j);
    double hi = pitch * static_cast<double>(per_arc * (j + 1));
    if (hi > kTwoPi) hi = kTwoPi;  // last arc truncated when k1 does not divide n
    m.arc_lo.push_back(lo);
    m.arc_hi.push_back(hi);

    if (trim == 0.0) {
      // Half-open [lo, hi): lattice points q with lo <= pitch*q < hi.
      const std::uint64_t q_lo = per_arc * j;
      const auto q_hi = static_cast<std::uint64_t>(std::ceil(hi / pitch - 1e-9));
      for (std::uint64_t q = q_lo; q < q_hi; ++q)
        m.theta.push_back(pitch * static_cast<double>(q));
    } else {
      // Closed [lo+trim, hi-trim] intersected with the lattice.
      const double a = lo + trim, b = hi - trim;
      auto q_lo = static_cast<std::uint64_t>(std::ceil(a / pitch - 1e-9));
      const auto q_hi = static_cast<std::uint64_t>(std::floor(b / pitch + 1e-9));
      for (std::uint64_t q = q_lo; q <= q_hi; ++q) {
        const double th = pitch * static_cast<double>(q);
        if (th >= kTwoPi) break;
        m.theta.push_back(th);
      }
    }
    m.arc_begin.push_back(m.theta.size());
  }
  m.validate();
  return m;
}

void Mesh::validate() const {
  // A malformed mesh reaching the engines is a caller configuration problem,
  // so these report as ConfigError rather than as internal invariants.
  if (theta.empty()) throw ConfigError("mesh: empty");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] >= 0.0 && theta[i] < kTwoPi))
      throw ConfigError("mesh: angle out of [0,2pi)");
    if (i > 0 && !(theta[i] > theta[i - 1]))
      throw ConfigError("mesh: angles not strictly increasing");
  }
  if (!arc_begin.empty()) {
    if (arc_begin.front() != 0 || arc_begin.back() != theta.size())
      throw ConfigError("mesh: arc index bookkeeping inconsistent");
    if (arc_lo.size() != arc_count() || arc_hi.size() != arc_count())
      throw ConfigError("mesh: arc bounds inconsistent");
  }
}

}  // namespace cbe
