#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "cbe/field.hpp"
#include "cbe/mesh.hpp"
#include "cbe/rng.hpp"
#include "cbe/stats.hpp"
#include "cbe/szego.hpp"

using namespace cbe;

namespace {

std::vector<cplx> draw_gammas(std::uint64_t seed, std::size_t count, double beta) {
  RngStream s = new_stream(seed, 0);
  std::vector<cplx> g;
  g.reserve(count);
  for (std::size_t k = 0; k < count; ++k) g.push_back(sample_verblunsky(s, k, beta).gamma);
  return g;
}

}  // namespace

TEST_CASE("mesh constructors produce sorted in-range angles") {
  Mesh m = Mesh::uniform(64);
  REQUIRE(m.size() == 64);
  m.validate();
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(m.theta[i] == doctest::Approx(kTwoPi * static_cast<double>(i) / 64.0).epsilon(1e-15));
  }
  CHECK(m.arc_count() == 0);

  Mesh bad;
  bad.theta = {0.0, 1.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(Mesh::uniform(0), ConfigError);
}

TEST_CASE("initial state: Psi_0(theta) = theta, phi_0 = 0, Phi*_0 = 1") {
  Mesh m = Mesh::uniform(16);
  RngStream s = new_stream(1, 0);
  RunFieldOptions opt;
  opt.steps = 0;
  opt.beta = 2.0;
  FieldTrajectory t = run_field(s, m, opt);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(t.psi[i] == m.theta[i]);
    CHECK(t.phi[i] == 0.0);
    CHECK(t.log_phi_star[i] == cplx(0.0, 0.0));
  }
}

TEST_CASE("zero coefficients collapse the recursion") {
  const double theta = 0.9378;
  double psi = theta;
  FieldPointState st;
  st.psi = theta;
  for (int k = 0; k < 40; ++k) {
    psi = prufer_step(psi, theta, cplx(0.0, 0.0));
    st = field_step(st, theta, cplx(0.0, 0.0), Sigma::kOne);
    CHECK(psi == doctest::Approx((k + 2) * theta).epsilon(1e-14));
    CHECK(st.psi == doctest::Approx((k + 2) * theta).epsilon(1e-14));
    CHECK(st.phi == 0.0);
    CHECK(st.log_phi_star == cplx(0.0, 0.0));
  }
}

TEST_CASE("relative Prufer phase obeys the monotonicity lemma") {
  // psi_k(theta) >= 0; floor_{2pi} psi_k nondecreasing in k; and the
  // fractional lower bound in its per-step form
  //   psi_{k+1} >= floor_{2pi}(psi_k) + theta,
  // i.e. the fractional part stays >= theta except exactly when the floor has
  // just advanced a winding.  (The unconditional form fails already for the
  // free recursion psi_k = (k+1) theta, e.g. theta = 1, k = 6.)
  const double beta = 2.0;
  for (double theta : {0.05, 0.9, kPi, 5.9}) {
    double psi = theta;
    RngStream sg = new_stream(3, static_cast<std::uint64_t>(theta * 1000));
    for (std::size_t k = 0; k < 200; ++k) {
      double prev_floor = kTwoPi * std::floor(psi / kTwoPi);
      cplx gamma = sample_verblunsky(sg, k, beta).gamma;
      psi = relative_prufer_step(psi, theta, gamma);
      CHECK(psi >= 0.0);
      double fl = kTwoPi * std::floor(psi / kTwoPi);
      CHECK(fl >= prev_floor);
      CHECK(psi >= prev_floor + theta - 1e-9);
    }
  }
}

TEST_CASE("absolute Prufer phase is nondecreasing across the mesh at every step") {
  Mesh m = Mesh::uniform(128);
  RngStream s = new_stream(4, 0);
  RunFieldOptions opt;
  opt.steps = 128;
  opt.beta = 1.0;
  opt.invariant_checks = true;  // run_field itself enforces per-step monotonicity
  FieldTrajectory t = run_field(s, m, opt);
  CHECK(std::is_sorted(t.psi.begin(), t.psi.end()));
}

TEST_CASE("winding: Psi_k(theta + 2pi) - Psi_k(theta) = (k+1) 2pi") {
  std::vector<cplx> g = draw_gammas(5, 32, 2.0);
  for (double theta : {0.3, 2.1, 4.4}) {
    double lo = psi_exact(g, theta);
    double hi = psi_exact(g, theta + kTwoPi);
    CHECK(hi - lo == doctest::Approx(33.0 * kTwoPi).epsilon(1e-12));
  }
}

TEST_CASE("sigma bookkeeping ties phi to the complex log field") {
  Mesh m = Mesh::uniform(64);
  for (Sigma sig : {Sigma::kOne, Sigma::kImag}) {
    RngStream s = new_stream(6, 0);
    RunFieldOptions opt;
    opt.steps = 300;
    opt.beta = 2.0;
    opt.sigma = sig;
    FieldTrajectory t = run_field(s, m, opt);
    for (std::size_t i = 0; i < m.size(); ++i) {
      double expect = sig == Sigma::kOne ? t.log_phi_star[i].real()
                                         : -t.log_phi_star[i].imag();
      CHECK(t.phi[i] == doctest::Approx(expect).epsilon(1e-10));
    }
  }
  CHECK(sigma_value(Sigma::kOne) == cplx(1.0, 0.0));
  CHECK(sigma_value(Sigma::kImag) == cplx(0.0, 1.0));
}

TEST_CASE("phase-domain field matches the coefficient-domain recursion") {
  // phi_n(theta) = 2 log|Phi*_n(e^{i theta})| with Phi*_n built from
  // coefficient arrays; max abs error < 1e-8 up to n = 256.
  Mesh m = Mesh::uniform(97);
  for (double beta : {1.0, 2.0}) {
    RngStream s = new_stream(7, static_cast<std::uint64_t>(beta));
    RunFieldOptions opt;
    opt.steps = 256;
    opt.beta = beta;
    opt.record_gammas = true;
    FieldTrajectory t = run_field(s, m, opt);
    SzegoPair pair = szego_coefficients(t.gammas);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      cplx z = std::polar(1.0, m.theta[i]);
      cplx phi_star = horner_eval(pair.phi_star, z);
      worst = std::max(worst, std::abs(t.phi[i] - 2.0 * std::log(std::abs(phi_star))));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("coefficient recursion satisfies the reversal identity exactly") {
  // Phi*_k(z) = z^k conj(Phi_k(1/conj z)), i.e. star coefficients are the
  // conjugated reversal of the plain coefficients.
  std::vector<cplx> g = draw_gammas(8, 48, 2.0);
  SzegoPair pair = szego_coefficients(g);
  std::size_t k = g.size();
  REQUIRE(pair.phi.size() == k + 1);
  REQUIRE(pair.phi_star.size() == k + 1);
  for (std::size_t j = 0; j <= k; ++j) {
    CHECK(pair.phi_star[j] == std::conj(pair.phi[k - j]));
  }
  // Leading/trailing structure: Phi_k is monic, Phi*_k(0) = 1.
  CHECK(pair.phi[k] == cplx(1.0, 0.0));
  CHECK(pair.phi_star[0] == cplx(1.0, 0.0));
}

TEST_CASE("Phi and Phi* share a modulus on the unit circle") {
  std::vector<cplx> g = draw_gammas(9, 32, 4.0);
  SzegoPair pair = szego_coefficients(g);
  RngStream s = new_stream(10, 0);
  for (int i = 0; i < 50; ++i) {
    cplx z = std::polar(1.0, s.uniform_angle());
    double a = std::abs(horner_eval(pair.phi, z));
    double b = std::abs(horner_eval(pair.phi_star, z));
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, a));
  }
}

TEST_CASE("X_1(z) = 1 - alpha z") {
  Mesh m = Mesh::uniform(32);
  RngStream s = new_stream(11, 0);
  RunFieldOptions opt;
  opt.steps = 0;  // n - 1 coefficients for n = 1
  opt.beta = 2.0;
  FieldTrajectory t = run_field(s, m, opt);
  cplx alpha = std::polar(1.0, 1.234);
  std::vector<cplx> x = eval_char_poly(t, alpha);
  for (std::size_t i = 0; i < m.size(); ++i) {
    cplx z = std::polar(1.0, m.theta[i]);
    CHECK(std::abs(x[i] - (cplx(1.0, 0.0) - alpha * z)) < 1e-14);
  }
}

TEST_CASE("characteristic polynomial second moment at z = 1 is n + 1") {
  // beta = 2: E|X_n(1)|^2 = n + 1, with alpha uniform on the circle.
  const double beta = 2.0;
  for (std::uint64_t n : {4ULL, 16ULL}) {
    RngStream s = new_stream(12, n);
    RunningStats st;
    const int kReps = 40000;
    for (int rep = 0; rep < kReps; ++rep) {
      FieldPointState ps;  // theta = 0: psi_0 = 0
      for (std::uint64_t k = 0; k + 1 < n; ++k) {
        cplx gamma = sample_verblunsky(s, k, beta).gamma;
        ps = field_step(ps, 0.0, gamma, Sigma::kOne);
      }
      cplx alpha = std::polar(1.0, s.uniform_angle());
      cplx x = std::exp(0.5 * ps.log_phi_star) *
               (cplx(1.0, 0.0) - alpha * std::polar(1.0, ps.psi));
      st.add(std::norm(x));
    }
    CHECK(std::abs(st.mean - static_cast<double>(n + 1)) < 3.0 * st.se());
  }
}

TEST_CASE("|X_n| never exceeds 2 |Phi*_{n-1}| on the circle") {
  Mesh m = Mesh::uniform(128);
  RngStream s = new_stream(13, 0);
  RunFieldOptions opt;
  opt.steps = 63;
  opt.beta = 2.0;
  FieldTrajectory t = run_field(s, m, opt);
  cplx alpha = std::polar(1.0, 0.77);
  std::vector<cplx> x = eval_char_poly(t, alpha);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double lhs = std::log(std::abs(x[i]));
    double rhs = 0.5 * t.log_phi_star[i].real() + std::log(2.0);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("counting function starts at zero, is nondecreasing, jumps by 2pi") {
  Mesh m = Mesh::uniform(4096);
  RngStream s = new_stream(14, 0);
  RunFieldOptions opt;
  opt.steps = 7;  // n = 8
  opt.beta = 2.0;
  opt.record_gammas = true;
  FieldTrajectory t = run_field(s, m, opt);
  cplx alpha = std::polar(1.0, 2.5);
  std::vector<double> count = counting_function(t, alpha);
  CHECK(count.front() == 0.0);
  double total_jump = 0.0;
  for (std::size_t i = 1; i < count.size(); ++i) {
    double d = count[i] - count[i - 1];
    CHECK(d >= 0.0);
    // nonzero jumps are integer multiples of 2 pi
    if (d > 0.0) {
      CHECK(std::abs(d / kTwoPi - std::round(d / kTwoPi)) < 1e-12);
    }
    total_jump += d;
  }
  std::vector<double> jumps = counting_jump_locations(t.gammas, alpha);
  REQUIRE(jumps.size() == 8);
  // Jumps located after the last mesh angle are not visible in count[].
  std::size_t visible = 0;
  for (double j : jumps) {
    if (j <= m.theta.back()) ++visible;
  }
  CHECK(total_jump == doctest::Approx(kTwoPi * static_cast<double>(visible)).epsilon(1e-12));
}

TEST_CASE("counting jumps coincide with the characteristic polynomial roots") {
  const double beta = 2.0;
  for (std::uint64_t n : {2ULL, 5ULL, 8ULL}) {
    for (int rep = 0; rep < 5; ++rep) {
      RngStream s = new_stream(15, 100 * n + static_cast<std::uint64_t>(rep));
      std::vector<cplx> gammas;
      for (std::uint64_t k = 0; k + 1 < n; ++k) {
        gammas.push_back(sample_verblunsky(s, k, beta).gamma);
      }
      cplx alpha = std::polar(1.0, s.uniform_angle());
      std::vector<double> jumps = counting_jump_locations(gammas, alpha);
      REQUIRE(jumps.size() == n);

      std::vector<cplx> coeffs = char_poly_coefficients(gammas, alpha);
      std::vector<cplx> roots = polynomial_roots(coeffs);
      REQUIRE(roots.size() == n);
      std::vector<double> root_angles;
      for (cplx r : roots) {
        CHECK(std::abs(std::abs(r) - 1.0) < 1e-9);
        root_angles.push_back(wrap_two_pi(std::arg(r)));
      }
      std::sort(root_angles.begin(), root_angles.end());
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(arc_distance(jumps[i], root_angles[i]) < 1e-6);
      }
    }
  }
}

TEST_CASE("identical streams give identical trajectories") {
  Mesh m = Mesh::uniform(64);
  RunFieldOptions opt;
  opt.steps = 200;
  opt.beta = 2.0;
  RngStream s1 = new_stream(16, 5);
  RngStream s2 = new_stream(16, 5);
  FieldTrajectory a = run_field(s1, m, opt);
  FieldTrajectory b = run_field(s2, m, opt);
  CHECK(a.psi == b.psi);
  CHECK(a.phi == b.phi);
  CHECK(a.log_phi_star == b.log_phi_star);
}

TEST_CASE("extend_field continues a run bit for bit") {
  Mesh m = Mesh::uniform(64);
  RunFieldOptions base;
  base.beta = 2.0;
  base.record_gammas = true;

  RngStream s1 = new_stream(17, 0);
  RunFieldOptions half = base;
  half.steps = 128;
  FieldTrajectory t = run_field(s1, m, half);
  extend_field(t, s1, 128);

  RngStream s2 = new_stream(17, 0);
  RunFieldOptions full = base;
  full.steps = 256;
  FieldTrajectory u = run_field(s2, m, full);

  CHECK(t.steps == u.steps);
  CHECK(t.psi == u.psi);
  CHECK(t.phi == u.phi);
  CHECK(t.log_phi_star == u.log_phi_star);
  CHECK(t.gammas == u.gammas);
}

TEST_CASE("extend_field rejects an empty trajectory") {
  FieldTrajectory t;
  RngStream s = new_stream(18, 0);
  CHECK_THROWS_AS(extend_field(t, s, 4), ConfigError);
}

TEST_CASE("psi_exact reproduces the trajectory phases") {
  Mesh m = Mesh::uniform(32);
  RngStream s = new_stream(19, 0);
  RunFieldOptions opt;
  opt.steps = 100;
  opt.beta = 2.0;
  opt.record_gammas = true;
  FieldTrajectory t = run_field(s, m, opt);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(std::abs(psi_exact(t.gammas, m.theta[i]) - t.psi[i]) < 1e-9);
  }
}

TEST_CASE("dyadic checkpoint schedule") {
  std::vector<std::uint64_t> cps = dyadic_checkpoints(20);
  REQUIRE(!cps.empty());
  CHECK(std::is_sorted(cps.begin(), cps.end()));
  CHECK(cps.back() == 20);
  for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
    bool pow2 = (cps[i] & (cps[i] - 1)) == 0;
    CHECK(pow2);
  }
}

TEST_CASE("checkpoints snapshot the same state as a shorter run") {
  Mesh m = Mesh::uniform(48);
  RunFieldOptions opt;
  opt.steps = 64;
  opt.beta = 2.0;
  opt.checkpoints = {16, 64};
  RngStream s1 = new_stream(20, 0);
  FieldTrajectory t = run_field(s1, m, opt);
  REQUIRE(t.checkpoints.size() == 2);
  CHECK(t.checkpoints[0].k == 16);
  CHECK(t.checkpoints[1].k == 64);
  CHECK(t.checkpoints[1].phi == t.phi);

  RngStream s2 = new_stream(20, 0);
  RunFieldOptions short_opt;
  short_opt.steps = 16;
  short_opt.beta = 2.0;
  FieldTrajectory u = run_field(s2, m, short_opt);
  CHECK(t.checkpoints[0].phi == u.phi);
}

TEST_CASE("fast engine tracks the canonical engine path by path") {
  Mesh m = Mesh::uniform(256);
  const double beta = 2.0;
  const std::uint64_t steps = 1024;
  RngStream s1 = new_stream(21, 0);
  RunFieldOptions opt;
  opt.steps = steps;
  opt.beta = beta;
  opt.checkpoints = {64, 1024};
  FieldTrajectory slow = run_field(s1, m, opt);

  RngStream s2 = new_stream(21, 0);
  FastFieldResult fast = run_field_fast(s2, m, steps, beta, {64, 1024});
  REQUIRE(fast.phi.size() == m.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    worst = std::max(worst, std::abs(fast.phi[i] - slow.phi[i]));
  }
  CHECK(worst < 1e-8);
  REQUIRE(fast.checkpoints.size() == 2);
  double worst_cp = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    worst_cp = std::max(worst_cp,
                        std::abs(fast.checkpoints[0].phi[i] - slow.checkpoints[0].phi[i]));
  }
  CHECK(worst_cp < 1e-8);
}

TEST_CASE("field law is symmetric under reflection of the circle") {
  // Psi_n(theta) and (n+1) 2pi - Psi_n(2pi - theta) share a law; two-sample
  // KS at the 5% critical value.
  const std::uint64_t n = 64;
  const std::size_t kReps = 600;
  Mesh m = Mesh::uniform(64);
  const std::size_t idx = 5;                 // theta_0 = 5 * 2pi/64
  const std::size_t ridx = 64 - idx;         // 2pi - theta_0
  std::vector<double> a, b;
  a.reserve(kReps);
  b.reserve(kReps);
  RunFieldOptions opt;
  opt.steps = n;
  opt.beta = 2.0;
  for (std::size_t rep = 0; rep < kReps; ++rep) {
    RngStream s1 = new_stream(22, rep);
    FieldTrajectory t = run_field(s1, m, opt);
    a.push_back(t.psi[idx]);
    RngStream s2 = new_stream(23, rep);
    FieldTrajectory u = run_field(s2, m, opt);
    b.push_back(static_cast<double>(n + 1) * kTwoPi - u.psi[ridx]);
  }
  double ks = ks_two_sample(a, b);
  double crit = 1.358 * std::sqrt(2.0 / static_cast<double>(kReps));
  CHECK(ks < crit);
}

TEST_CASE("memory budget guard") {
  CHECK(memory_cap_bytes() > 0);
  CHECK_NOTHROW(check_memory_budget(1024, "small"));
  CHECK_THROWS_AS(check_memory_budget(memory_cap_bytes() + 1, "huge"), ConfigError);
}

TEST_CASE("fast engine throughput at n = 2^20 on a 4096-point mesh") {
  Mesh m = Mesh::uniform(4096);
  RngStream s = new_stream(24, 0);
  const std::uint64_t steps = 1ULL << 20;
  auto t0 = std::chrono::steady_clock::now();
  FastFieldResult r = run_field_fast(s, m, steps, 2.0);
  auto t1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(t1 - t0).count();
  REQUIRE(r.phi.size() == m.size());
  double rate = static_cast<double>(steps) * static_cast<double>(m.size()) / secs;
  MESSAGE("fast field throughput: ", rate / 1e6, " point-steps/us total ",
          secs, " s");
  // All outputs finite.
  for (double v : r.phi) CHECK(std::isfinite(v));
}
