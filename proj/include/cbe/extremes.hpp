#pragma once

#include <cstdint>
#include <vector>

#include "cbe/common.hpp"
#include "cbe/field.hpp"
#include "cbe/mesh.hpp"

namespace cbe {

// Second-order centering of the maximum: m_n = log n - (3/4) log log n.
double m_centering(std::uint64_t n);

// Scale factors multiplying m_n for the two maximum statistics.
double phi_scale(double beta);      // sqrt(8/beta), for the phi-field maximum
double log_abs_scale(double beta);  // sqrt(2/beta), for the log|X_n| maximum

struct Centering {
  std::uint64_t n = 0;
  double m_n = 0.0;
  double scale = 0.0;  // phi or log|X| scale per the requested statistic
};

enum class MaxStatistic { kPhiField, kLogAbsCharPoly };

Centering centering(std::uint64_t n, double beta, MaxStatistic stat);

// Global maximum of phi over the mesh with a certified continuum bracket.
// The bracket applies |Q|^2-interpolation over 2*m*k-th roots of unity to
// Q = Phi*_k, so it requires sigma = 1 and a uniform mesh whose point count
// is a multiple of 2*m*steps.
struct GlobalMax {
  double value = 0.0;   // max of phi over the mesh
  double theta = 0.0;   // argmax, smallest theta on ties
  double upper = 0.0;   // certified upper bound for the continuum max of phi
};

GlobalMax global_max(const FieldTrajectory& traj, std::uint64_t m = 4);

// Mesh-only maximum (no certificate); valid for either sigma.
GlobalMax mesh_max(const std::vector<double>& phi, const Mesh& mesh);

// Arc decomposition wrapper: ceil(n/k1) arcs with the 2 pi/(4 k5 n) lattice.
Mesh arc_decomposition(std::uint64_t n, std::uint64_t k1, std::uint64_t k5,
                       bool trimmed = false);

// One marked point per arc: theta_j = sup of the arc, v = local centered max
// of phi over the arc's mesh points, f = decoration samples over the arc
// lattice mapped to the window [-2 pi k1, 0] (left to right).
struct MarkedPoint {
  double theta = 0.0;
  double v = 0.0;
  std::vector<cplx> f;
};

std::vector<MarkedPoint> extract_extremal_process(const FieldTrajectory& traj);

// Extremes of the rotation statistic f(theta) = n*theta - N_n(theta)
//   = 2 Im(log X_n(e^{i theta}) - log X_n(1))
// computed from a trajectory with steps = n - 1, centered by the phi scale.
struct ImaginaryExtremes {
  double i_plus = 0.0;   // max f - sqrt(8/beta) m_n
  double i_minus = 0.0;  // min f + sqrt(8/beta) m_n
  double max_raw = 0.0;
  double min_raw = 0.0;
};

ImaginaryExtremes imaginary_extremes(const FieldTrajectory& traj, cplx alpha);

// Window-growth parameters for the intermediate scales.
double k1_plus(double k1);  // k1 * exp((log k1)^{29/30})
double k1_hat(double k1);   // k1 * exp((log k1)^{19/20})

// V_j = sqrt(2) m_{n1+} - sqrt(beta/4) phi_{n1+}(theta_j) per arc, where
// n1+ = floor(n / k1_plus(k1)); requires a checkpoint at n1+ in the
// trajectory (phi evaluated at the mesh point nearest to theta_j).
std::vector<double> v_statistic(const FieldTrajectory& traj, std::uint64_t k1);

}  // namespace cbe
