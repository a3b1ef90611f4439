#pragma once

#include <cstdint>
#include <vector>

#include "cbe/common.hpp"
#include "cbe/mesh.hpp"
#include "cbe/rng.hpp"

namespace cbe {

// Which linear statistic the field accumulates: phi_k = 2 Re(sigma log Phi*_k)
// with sigma = 1 (modulus field) or sigma = i (rotation/counting field).
enum class Sigma { kOne, kImag };

cplx sigma_value(Sigma s);

// --- single-point recursion steps -----------------------------------------

// Absolute Prufer phase: Psi_{k+1} = Psi_k + theta - 2 Im log(1 - gamma e^{i Psi_k}),
// Psi_0 = theta.  The log is principal; its argument has positive real part.
double prufer_step(double psi, double theta, cplx gamma);

// Relative Prufer phase: psi_{k+1} = psi_k + theta
//   - 2 Im (log(1 - gamma e^{i psi_k}) - log(1 - gamma)), psi_0 = theta.
double relative_prufer_step(double psi, double theta, cplx gamma);

// Joint single-point state.  log_phi_star accumulates 2 log Phi*_k along the
// recursion branch; phi accumulates 2 Re(sigma log(1 - gamma e^{i Psi_k})).
// Both accumulations use the pre-update phase.
struct FieldPointState {
  double psi = 0.0;
  double phi = 0.0;
  cplx log_phi_star = cplx(0.0, 0.0);
};

FieldPointState field_step(const FieldPointState& s, double theta, cplx gamma,
                           Sigma sigma);

// --- full trajectories ------------------------------------------------------

struct FieldCheckpoint {
  std::uint64_t k = 0;           // coefficients consumed at this snapshot
  std::vector<double> phi;       // phi_k over the mesh
};

struct FieldTrajectory {
  std::uint64_t steps = 0;       // coefficients consumed
  double beta = 0.0;
  Sigma sigma = Sigma::kOne;
  Mesh mesh;
  std::vector<double> psi;           // Psi_steps over the mesh
  std::vector<double> phi;           // phi_steps over the mesh
  std::vector<cplx> log_phi_star;    // 2 log Phi*_steps over the mesh
  std::vector<cplx> gammas;          // recorded iff requested
  std::vector<FieldCheckpoint> checkpoints;
};

struct RunFieldOptions {
  std::uint64_t steps = 0;
  double beta = 0.0;
  Sigma sigma = Sigma::kOne;
  bool invariant_checks = true;              // monotonicity + phase identity
  bool record_gammas = false;
  std::vector<std::uint64_t> checkpoints;    // strictly increasing k values
};

// Snapshot schedule at k = 1, 2, 4, ..., plus the final step count.
std::vector<std::uint64_t> dyadic_checkpoints(std::uint64_t steps);

// Canonical engine: full complex-log arithmetic at every mesh point, with
// optional always-on invariant verification (Psi strictly increasing across
// the mesh at every step; Psi_k = (k+1) theta - Im(2 log Phi*_k) at snapshot
// instants).  Memory use is validated against the cap before allocation.
FieldTrajectory run_field(RngStream& stream, const Mesh& mesh,
                          const RunFieldOptions& opt);

// Continue a canonical trajectory in place by extra_steps further
// coefficients.  When the stream is the one run_field consumed, positioned
// exactly where it stopped, the extended trajectory is bit-identical to an
// uninterrupted run with steps + extra_steps.
void extend_field(FieldTrajectory& traj, RngStream& stream,
                  std::uint64_t extra_steps, bool invariant_checks = true);

// Performance engine for the sigma = 1 field: tracks u = e^{i Psi} and the
// Phi* residual in the linear domain (three complex multiplies and one
// division per mesh point per step, no transcendentals), flushing
// accumulated log-moduli every few steps.  Draws coefficients in exactly the
// same stream order as run_field, so the two engines are comparable path by
// path.  Returns phi at the requested checkpoints and at the final step.
struct FastFieldResult {
  std::uint64_t steps = 0;
  std::vector<double> phi;
  std::vector<FieldCheckpoint> checkpoints;
};

FastFieldResult run_field_fast(RngStream& stream, const Mesh& mesh,
                               std::uint64_t steps, double beta,
                               const std::vector<std::uint64_t>& checkpoints = {});

// --- characteristic polynomial & counting ----------------------------------

// X_n(e^{i theta}) over the mesh from a trajectory with steps = n - 1:
// X_n = Phi*_{n-1} (1 - alpha e^{i Psi_{n-1}}), Phi* = exp(log_phi_star / 2).
std::vector<cplx> eval_char_poly(const FieldTrajectory& traj, cplx alpha);

// 2 pi * (number of roots of X_n in (0, theta]) for every mesh angle, via the
// floor formula on the monotone phase: the roots are the crossings of
// Psi_{n-1} through -arg(alpha) mod 2 pi.
std::vector<double> counting_function(const FieldTrajectory& traj, cplx alpha);

// Exact phase at an arbitrary angle by re-running the recursion over the
// recorded coefficients (O(steps) per call).
double psi_exact(const std::vector<cplx>& gammas, double theta);

// All n root angles in [0, 2 pi), located by bisection on the monotone phase
// (n = gammas.size() + 1).
std::vector<double> counting_jump_locations(const std::vector<cplx>& gammas,
                                            cplx alpha);

// Reads CBE_MEM_CAP_MB (default 4096); throws ConfigError when a planned
// allocation would exceed it.
std::uint64_t memory_cap_bytes();
void check_memory_budget(std::uint64_t bytes_needed, const char* what);

}  // namespace cbe
