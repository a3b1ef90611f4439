#include "cbe/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>

namespace cbe {

cplx sigma_value(Sigma s) {
  return s == Sigma::kOne ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
}

namespace {

inline cplx log_one_minus(cplx gamma, double psi) {
  // 1 - gamma e^{i psi} lies in the right half plane (|gamma| < 1), so the
  // principal log is smooth in psi.  Written out componentwise: the argument
  // has modulus in (0, 2), so 0.5 log(re^2 + im^2) needs no overflow guard and
  // avoids the hypot path of std::log(std::complex), which dominates the
  // field engine's cost otherwise.
  const double c = std::cos(psi), s = std::sin(psi);
  const double re = 1.0 - (gamma.real() * c - gamma.imag() * s);
  const double im = -(gamma.real() * s + gamma.imag() * c);
  return cplx(0.5 * std::log(re * re + im * im), std::atan2(im, re));
}

}  // namespace

double prufer_step(double psi, double theta, cplx gamma) {
  return psi + theta - 2.0 * log_one_minus(gamma, psi).imag();
}

double relative_prufer_step(double psi, double theta, cplx gamma) {
  const cplx base = std::log(cplx(1.0, 0.0) - gamma);
  return psi + theta - 2.0 * (log_one_minus(gamma, psi).imag() - base.imag());
}

FieldPointState field_step(const FieldPointState& s, double theta, cplx gamma,
                           Sigma sigma) {
  const cplx l = log_one_minus(gamma, s.psi);  // pre-update phase
  FieldPointState out;
  out.phi = s.phi + 2.0 * (sigma_value(sigma) * l).real();
  out.log_phi_star = s.log_phi_star + 2.0 * l;
  out.psi = s.psi + theta - 2.0 * l.imag();
  return out;
}

std::vector<std::uint64_t> dyadic_checkpoints(std::uint64_t steps) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t k = 1; k < steps; k *= 2) out.push_back(k);
  if (steps > 0) out.push_back(steps);
  return out;
}

std::uint64_t memory_cap_bytes() {
  const char* env = std::getenv("CBE_MEM_CAP_MB");
  std::uint64_t mb = 4096;
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || parsed == 0)
      throw ConfigError("CBE_MEM_CAP_MB must be a positive integer");
    mb = parsed;
  }
  return mb * 1024ULL * 1024ULL;
}

void check_memory_budget(std::uint64_t bytes_needed, const char* what) {
  const std::uint64_t cap = memory_cap_bytes();
  if (bytes_needed > cap)
    throw ConfigError(std::string(what) + ": estimated " +
                      std::to_string(bytes_needed / (1024 * 1024)) +
                      " MB exceeds CBE_MEM_CAP_MB");
}

namespace {

void validate_run_options(const Mesh& mesh, const RunFieldOptions& opt) {
  mesh.validate();
  // steps == 0 is legal: it yields the initial state (Psi_0 = theta,
  // phi_0 = 0, Phi*_0 = 1), which is what X_1 evaluation consumes.
  if (opt.beta <= 0.0) throw ConfigError("run_field: beta must be positive");
  for (std::size_t i = 0; i < opt.checkpoints.size(); ++i) {
    if (opt.checkpoints[i] == 0 || opt.checkpoints[i] > opt.steps)
      throw ConfigError("run_field: checkpoint outside (0, steps]");
    if (i > 0 && opt.checkpoints[i] <= opt.checkpoints[i - 1])
      throw ConfigError("run_field: checkpoints must be strictly increasing");
  }
}

}  // namespace

FieldTrajectory run_field(RngStream& stream, const Mesh& mesh,
                          const RunFieldOptions& opt) {
  validate_run_options(mesh, opt);
  const std::size_t m = mesh.size();
  const std::uint64_t base_bytes = static_cast<std::uint64_t>(m) * 8 * 4;
  const std::uint64_t ckpt_bytes =
      static_cast<std::uint64_t>(opt.checkpoints.size()) * m * 8;
  check_memory_budget(base_bytes + ckpt_bytes, "run_field");

  FieldTrajectory t;
  t.steps = opt.steps;
  t.beta = opt.beta;
  t.sigma = opt.sigma;
  t.mesh = mesh;
  t.psi = mesh.theta;  // Psi_0 = theta
  t.phi.assign(m, 0.0);
  t.log_phi_star.assign(m, cplx(0.0, 0.0));
  if (opt.record_gammas) t.gammas.reserve(opt.steps);

  const cplx sig = sigma_value(opt.sigma);
  std::size_t next_ckpt = 0;

  for (std::uint64_t k = 0; k < opt.steps; ++k) {
    const Verblunsky v = sample_verblunsky(stream, k, opt.beta);
    const cplx gamma = v.gamma;
    if (opt.record_gammas) t.gammas.push_back(gamma);

    for (std::size_t i = 0; i < m; ++i) {
      const cplx l = log_one_minus(gamma, t.psi[i]);
      t.phi[i] += 2.0 * (sig * l).real();
      t.log_phi_star[i] += 2.0 * l;
      t.psi[i] += mesh.theta[i] - 2.0 * l.imag();
    }

    if (opt.invariant_checks) {
      for (std::size_t i = 1; i < m; ++i)
        CBE_CHECK(t.psi[i] > t.psi[i - 1],
                  "run_field: phase lost strict monotonicity across the mesh");
    }

    if (next_ckpt < opt.checkpoints.size() &&
        opt.checkpoints[next_ckpt] == k + 1) {
      if (opt.invariant_checks) {
        const double kk = static_cast<double>(k + 1);
        for (std::size_t i = 0; i < m; ++i) {
          const double lhs = t.psi[i];
          const double rhs = (kk + 1.0) * mesh.theta[i] - t.log_phi_star[i].imag();
          CBE_CHECK(std::abs(lhs - rhs) <= 1e-7 * (1.0 + std::abs(lhs)),
                    "run_field: phase/log identity violated at checkpoint");
        }
      }
      t.checkpoints.push_back({k + 1, t.phi});
      ++next_ckpt;
    }
  }

  if (opt.invariant_checks) {
    const double kk = static_cast<double>(opt.steps);
    for (std::size_t i = 0; i < m; ++i) {
      const double rhs = (kk + 1.0) * mesh.theta[i] - t.log_phi_star[i].imag();
      CBE_CHECK(std::abs(t.psi[i] - rhs) <= 1e-7 * (1.0 + std::abs(t.psi[i])),
                "run_field: phase/log identity violated at final step");
    }
  }
  return t;
}

void extend_field(FieldTrajectory& traj, RngStream& stream,
                  std::uint64_t extra_steps, bool invariant_checks) {
  if (traj.mesh.size() == 0 || traj.psi.size() != traj.mesh.size() ||
      traj.beta <= 0.0)
    throw ConfigError("extend_field: trajectory is not a completed canonical run");
  const std::size_t m = traj.mesh.size();
  const bool record = traj.gammas.size() == traj.steps;
  const cplx sig = sigma_value(traj.sigma);

  for (std::uint64_t k = traj.steps; k < traj.steps + extra_steps; ++k) {
    const Verblunsky v = sample_verblunsky(stream, k, traj.beta);
    if (record) traj.gammas.push_back(v.gamma);
    for (std::size_t i = 0; i < m; ++i) {
      const cplx l = log_one_minus(v.gamma, traj.psi[i]);
      traj.phi[i] += 2.0 * (sig * l).real();
      traj.log_phi_star[i] += 2.0 * l;
      traj.psi[i] += traj.mesh.theta[i] - 2.0 * l.imag();
    }
    if (invariant_checks) {
      for (std::size_t i = 1; i < m; ++i)
        CBE_CHECK(traj.psi[i] > traj.psi[i - 1],
                  "extend_field: phase lost strict monotonicity across the mesh");
    }
  }
  traj.steps += extra_steps;

  if (invariant_checks) {
    const double kk = static_cast<double>(traj.steps);
    for (std::size_t i = 0; i < m; ++i) {
      const double rhs =
          (kk + 1.0) * traj.mesh.theta[i] - traj.log_phi_star[i].imag();
      CBE_CHECK(std::abs(traj.psi[i] - rhs) <= 1e-7 * (1.0 + std::abs(traj.psi[i])),
                "extend_field: phase/log identity violated");
    }
  }
}

FastFieldResult run_field_fast(RngStream& stream, const Mesh& mesh,
                               std::uint64_t steps, double beta,
                               const std::vector<std::uint64_t>& checkpoints) {
  RunFieldOptions probe;
  probe.steps = steps;
  probe.beta = beta;
  probe.checkpoints = checkpoints;
  validate_run_options(mesh, probe);

  const std::size_t m = mesh.size();
  check_memory_budget(static_cast<std::uint64_t>(m) * 8 * 7 +
                          static_cast<std::uint64_t>(checkpoints.size()) * m * 8,
                      "run_field_fast");

  std::vector<double> ct(m), st(m);       // e^{i theta} per mesh point
  for (std::size_t i = 0; i < m; ++i) {
    ct[i] = std::cos(mesh.theta[i]);
    st[i] = std::sin(mesh.theta[i]);
  }
  std::vector<double> ur(m), ui(m);       // u = e^{i Psi_k}
  std::vector<double> pr(m, 1.0), pi_(m, 0.0);  // running Phi* block product
  std::vector<double> phi(m, 0.0);        // flushed log |...|^2 accumulator
  for (std::size_t i = 0; i < m; ++i) {
    ur[i] = ct[i];
    ui[i] = st[i];
  }

  FastFieldResult out;
  out.steps = steps;

  auto flush = [&](bool renorm) {
    for (std::size_t i = 0; i < m; ++i) {
      const double n2 = pr[i] * pr[i] + pi_[i] * pi_[i];
      CBE_CHECK(n2 > 0.0 && std::isfinite(n2),
                "run_field_fast: block product left the representable range");
      phi[i] += std::log(n2);
      pr[i] = 1.0;
      pi_[i] = 0.0;
      if (renorm) {
        const double un = std::sqrt(ur[i] * ur[i] + ui[i] * ui[i]);
        ur[i] /= un;
        ui[i] /= un;
      }
    }
  };

  std::size_t next_ckpt = 0;
  const std::uint64_t kBlock = 32;
  std::uint64_t since_flush = 0;

  for (std::uint64_t k = 0; k < steps; ++k) {
    const Verblunsky v = sample_verblunsky(stream, k, beta);
    const double gr = v.gamma.real(), gi = v.gamma.imag();

    for (std::size_t i = 0; i < m; ++i) {
      // w = gamma * u ; z = 1 - w
      const double wr = gr * ur[i] - gi * ui[i];
      const double wi = gr * ui[i] + gi * ur[i];
      const double zr = 1.0 - wr, zi = -wi;
      // block product *= z
      const double npr = pr[i] * zr - pi_[i] * zi;
      const double npi = pr[i] * zi + pi_[i] * zr;
      pr[i] = npr;
      pi_[i] = npi;
      // u <- u * e^{i theta} * conj(z)^2 / |z|^2
      const double zn = zr * zr + zi * zi;
      const double cr = (zr * zr - zi * zi) / zn;  // Re conj(z)^2 / |z|^2
      const double ci = (-2.0 * zr * zi) / zn;     // Im conj(z)^2 / |z|^2
      const double rr = ct[i] * cr - st[i] * ci;   // rotation e^{i theta} * (...)
      const double ri = ct[i] * ci + st[i] * cr;
      const double nur = ur[i] * rr - ui[i] * ri;
      const double nui = ur[i] * ri + ui[i] * rr;
      ur[i] = nur;
      ui[i] = nui;
    }

    ++since_flush;
    const bool ckpt_due = next_ckpt < checkpoints.size() &&
                          checkpoints[next_ckpt] == k + 1;
    // Early coefficients can have modulus near 1; flush every step there so
    // the block product cannot drift toward the underflow threshold.
    if (ckpt_due || since_flush >= kBlock || k < 64 || k + 1 == steps) {
      flush(true);
      since_flush = 0;
    }
    if (ckpt_due) {
      out.checkpoints.push_back({k + 1, phi});
      ++next_ckpt;
    }
  }
  out.phi = std::move(phi);
  return out;
}

std::vector<cplx> eval_char_poly(const FieldTrajectory& traj, cplx alpha) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12)
    throw ConfigError("eval_char_poly: alpha must be unimodular");
  const std::size_t m = traj.mesh.size();
  std::vector<cplx> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const cplx phi_star = std::exp(0.5 * traj.log_phi_star[i]);
    out[i] = phi_star * (cplx(1.0, 0.0) - alpha * std::polar(1.0, traj.psi[i]));
  }
  return out;
}

std::vector<double> counting_function(const FieldTrajectory& traj, cplx alpha) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12)
    throw ConfigError("counting_function: alpha must be unimodular");
  CBE_CHECK(!traj.mesh.theta.empty() && traj.mesh.theta.front() == 0.0,
            "counting_function: mesh must start at theta = 0");
  const double c = -std::arg(alpha);  // crossing level, any 2 pi representative
  const std::size_t m = traj.mesh.size();
  std::vector<double> out(m);
  const double base = std::floor((traj.psi[0] - c) / kTwoPi);
  for (std::size_t i = 0; i < m; ++i)
    out[i] = kTwoPi * (std::floor((traj.psi[i] - c) / kTwoPi) - base);
  return out;
}

double psi_exact(const std::vector<cplx>& gammas, double theta) {
  double psi = theta;
  for (const cplx& g : gammas) psi = prufer_step(psi, theta, g);
  return psi;
}

std::vector<double> counting_jump_locations(const std::vector<cplx>& gammas,
                                            cplx alpha) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12)
    throw ConfigError("counting_jump_locations: alpha must be unimodular");
  const auto n = static_cast<std::uint64_t>(gammas.size()) + 1;
  const double c = -std::arg(alpha);
  const double psi0 = psi_exact(gammas, 0.0);
  // Psi is strictly increasing with Psi(2 pi) = Psi(0) + 2 pi n, so there are
  // exactly n crossing levels c + 2 pi m in (Psi(0), Psi(2 pi)].
  std::vector<double> roots;
  roots.reserve(n);
  const double m0 = std::floor((psi0 - c) / kTwoPi);
  for (std::uint64_t j = 1; j <= n; ++j) {
    const double level = c + kTwoPi * (m0 + static_cast<double>(j));
    double lo = 0.0, hi = kTwoPi;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (psi_exact(gammas, mid) < level)
        lo = mid;
      else
        hi = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

}  // namespace cbe
