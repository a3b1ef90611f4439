#include "cbe/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbe {

double m_centering(std::uint64_t n) {
  if (n < 3) throw ConfigError("m_centering: requires n >= 3");
  const double ln = std::log(static_cast<double>(n));
  return ln - 0.75 * std::log(ln);
}

double phi_scale(double beta) {
  if (beta <= 0.0) throw ConfigError("phi_scale: beta must be positive");
  return std::sqrt(8.0 / beta);
}

double log_abs_scale(double beta) {
  if (beta <= 0.0) throw ConfigError("log_abs_scale: beta must be positive");
  return std::sqrt(2.0 / beta);
}

Centering centering(std::uint64_t n, double beta, MaxStatistic stat) {
  Centering c;
  c.n = n;
  c.m_n = m_centering(n);
  c.scale = stat == MaxStatistic::kPhiField ? phi_scale(beta)
                                            : log_abs_scale(beta);
  return c;
}

GlobalMax mesh_max(const std::vector<double>& phi, const Mesh& mesh) {
  CBE_CHECK(phi.size() == mesh.size() && !phi.empty(),
            "mesh_max: phi/mesh size mismatch");
  GlobalMax out;
  out.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (phi[i] > out.value) {  // strict: smallest theta wins on ties
      out.value = phi[i];
      out.theta = mesh.theta[i];
    }
  }
  out.upper = std::numeric_limits<double>::infinity();
  return out;
}

GlobalMax global_max(const FieldTrajectory& traj, std::uint64_t m) {
  if (m < 2) throw ConfigError("global_max: refinement factor m must be >= 2");
  if (traj.sigma != Sigma::kOne)
    throw ConfigError("global_max: certified bracket requires sigma = 1");
  const std::size_t count = traj.mesh.size();
  // Uniform mesh check: arcs bookkeeping absent and spacing exact.
  const bool uniform = traj.mesh.arc_begin.empty();
  if (!uniform || count % (2 * m * traj.steps) != 0)
    throw ConfigError(
        "global_max: mesh incompatible with refinement factor (need uniform "
        "mesh with count divisible by 2*m*steps)");
  GlobalMax out = mesh_max(traj.phi, traj.mesh);
  // max over circle of |Q|^2 <= (m/(m-1)) * max over 2mk-th roots of unity,
  // so in log units the bracket is an additive log(m/(m-1)).
  out.upper = out.value + std::log(static_cast<double>(m) /
                                   static_cast<double>(m - 1));
  return out;
}

Mesh arc_decomposition(std::uint64_t n, std::uint64_t k1, std::uint64_t k5,
                       bool trimmed) {
  double trim = 0.0;
  if (trimmed)
    trim = kTwoPi * std::log(static_cast<double>(k1)) / static_cast<double>(n);
  return Mesh::arcs(n, k1, k5, trim);
}

std::vector<MarkedPoint> extract_extremal_process(const FieldTrajectory& traj) {
  const Mesh& mesh = traj.mesh;
  if (mesh.arc_count() == 0)
    throw ConfigError("extract_extremal_process: trajectory mesh has no arcs");
  const auto n = traj.steps;
  const double cent = phi_scale(traj.beta) * m_centering(n);

  std::vector<MarkedPoint> out;
  out.reserve(mesh.arc_count());
  for (std::size_t j = 0; j < mesh.arc_count(); ++j) {
    const std::size_t lo = mesh.arc_begin[j], hi = mesh.arc_begin[j + 1];
    CBE_CHECK(hi > lo, "extract_extremal_process: empty arc");
    MarkedPoint p;
    p.theta = mesh.arc_hi[j];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) best = std::max(best, traj.phi[i]);
    p.v = best - cent;
    p.f.reserve(hi - lo);
    if (traj.sigma == Sigma::kOne) {
      // (Phi*_n)^2 (theta_i) * exp(-i (n+1) theta_j - centering)
      const cplx twist =
          std::polar(1.0, -(static_cast<double>(n) + 1.0) * p.theta);
      for (std::size_t i = lo; i < hi; ++i)
        p.f.push_back(std::exp(traj.log_phi_star[i] - cent) * twist);
    } else {
      for (std::size_t i = lo; i < hi; ++i)
        p.f.push_back(cplx(std::exp(traj.phi[i] - cent), 0.0));
    }
    out.push_back(std::move(p));
  }
  return out;
}

ImaginaryExtremes imaginary_extremes(const FieldTrajectory& traj, cplx alpha) {
  const std::vector<double> count = counting_function(traj, alpha);
  const auto n = static_cast<double>(traj.steps + 1);
  const double cent = phi_scale(traj.beta) * m_centering(traj.steps + 1);
  ImaginaryExtremes out;
  out.max_raw = -std::numeric_limits<double>::infinity();
  out.min_raw = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count.size(); ++i) {
    const double f = n * traj.mesh.theta[i] - count[i];
    out.max_raw = std::max(out.max_raw, f);
    out.min_raw = std::min(out.min_raw, f);
  }
  out.i_plus = out.max_raw - cent;
  out.i_minus = out.min_raw + cent;
  return out;
}

double k1_plus(double k1) {
  if (k1 <= 1.0) throw ConfigError("k1_plus: requires k1 > 1");
  const double l = std::log(k1);
  return k1 * std::exp(std::pow(l, 29.0 / 30.0));
}

double k1_hat(double k1) {
  if (k1 <= 1.0) throw ConfigError("k1_hat: requires k1 > 1");
  const double l = std::log(k1);
  return k1 * std::exp(std::pow(l, 19.0 / 20.0));
}

std::vector<double> v_statistic(const FieldTrajectory& traj, std::uint64_t k1) {
  const Mesh& mesh = traj.mesh;
  if (mesh.arc_count() == 0)
    throw ConfigError("v_statistic: trajectory mesh has no arcs");
  const auto n1p = static_cast<std::uint64_t>(
      static_cast<double>(traj.steps) / k1_plus(static_cast<double>(k1)));
  const FieldCheckpoint* snap = nullptr;
  for (const auto& c : traj.checkpoints)
    if (c.k == n1p) snap = &c;
  if (snap == nullptr)
    throw ConfigError("v_statistic: missing checkpoint at n1_plus");
  const double m1 = m_centering(n1p);
  const double scale = std::sqrt(traj.beta / 4.0);

  std::vector<double> out;
  out.reserve(mesh.arc_count());
  for (std::size_t j = 0; j < mesh.arc_count(); ++j) {
    // phi_{n1+}(theta_j) at the mesh point nearest to the arc supremum,
    // wrapping 2 pi to 0 (the field is 2 pi-periodic).
    double target = mesh.arc_hi[j];
    if (target >= kTwoPi) target -= kTwoPi;
    std::size_t best_i = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const double d = arc_distance(mesh.theta[i], target);
      if (d < best_d) {
        best_d = d;
        best_i = i;
      }
    }
    out.push_back(std::sqrt(2.0) * m1 - scale * snap->phi[best_i]);
  }
  return out;
}

}  // namespace cbe
