#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "cbe/rng.hpp"
#include "cbe/special.hpp"
#include "cbe/stats.hpp"

using namespace cbe;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// CDF of |gamma|^2 when |gamma|^2 ~ Beta(1, b): 1 - (1 - x)^b.
double beta1b_cdf(double x, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - x, b);
}

}  // namespace

TEST_CASE("same seed and stream id reproduce the sequence bit for bit") {
  RngStream a = new_stream(42, 0);
  RngStream b = new_stream(42, 0);
  for (int i = 0; i < 4096; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  CHECK(a.position() == 4096);
  CHECK(a.seed() == 42);
  CHECK(a.stream_id() == 0);
}

TEST_CASE("distinct stream ids pass a pairwise independence chi-square at 1%") {
  RngStream a = new_stream(42, 0);
  RngStream b = new_stream(42, 1);
  const int kBins = 16;
  const std::size_t kDraws = 1000000;
  std::vector<double> observed(kBins * kBins, 0.0);
  for (std::size_t i = 0; i < kDraws; ++i) {
    int ba = std::min(kBins - 1, static_cast<int>(a.uniform01() * kBins));
    int bb = std::min(kBins - 1, static_cast<int>(b.uniform01() * kBins));
    observed[static_cast<std::size_t>(ba * kBins + bb)] += 1.0;
  }
  std::vector<double> expected(kBins * kBins,
                               static_cast<double>(kDraws) / (kBins * kBins));
  double stat = chi_square_stat(observed, expected);
  double p = chi_square_pvalue(stat, kBins * kBins - 1.0);
  CHECK(p > 0.01);
}

TEST_CASE("advance fast-forwards to the same state as drawing") {
  RngStream slow = new_stream(42, 0);
  for (std::size_t i = 0; i < 1000000; ++i) slow.next_u64();
  RngStream fast = new_stream(42, 0);
  fast.advance(1000000);
  CHECK(slow.position() == fast.position());
  for (int i = 0; i < 256; ++i) {
    CHECK(slow.next_u64() == fast.next_u64());
  }
}

TEST_CASE("advance composes additively") {
  RngStream a = new_stream(7, 3);
  a.advance(12345);
  a.advance(67890);
  RngStream b = new_stream(7, 3);
  b.advance(12345 + 67890);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("cross-stream correlation of the first draws is negligible") {
  const std::size_t kDraws = 100000;
  // A handful of stream pairs, including adjacent ids.
  const std::uint64_t ids[4][2] = {{0, 1}, {1, 2}, {0, 1000003}, {5, 6}};
  for (const auto& pr : ids) {
    RngStream a = new_stream(42, pr[0]);
    RngStream b = new_stream(42, pr[1]);
    std::vector<double> xs(kDraws), ys(kDraws);
    for (std::size_t i = 0; i < kDraws; ++i) {
      xs[i] = a.uniform01();
      ys[i] = b.uniform01();
    }
    CHECK(std::abs(pearson_corr(xs, ys)) < 0.01);
  }
}

TEST_CASE("uniform01 moments and KS against the uniform law") {
  RngStream s = new_stream(11, 0);
  const std::size_t kDraws = 1000000;
  RunningStats st;
  std::vector<double> sample;
  sample.reserve(kDraws);
  for (std::size_t i = 0; i < kDraws; ++i) {
    double u = s.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    st.add(u);
    sample.push_back(u);
  }
  CHECK(std::abs(st.mean - 0.5) < 3.0 * st.se());
  CHECK(std::abs(st.variance() - 1.0 / 12.0) < 0.001);
  double ks = ks_statistic(sample, [](double x) { return x; });
  CHECK(ks < 0.01);
}

TEST_CASE("normal sampler moments and KS against the Gaussian law") {
  RngStream s = new_stream(12, 0);
  const std::size_t kDraws = 400000;
  RunningStats st;
  std::vector<double> sample;
  sample.reserve(kDraws);
  for (std::size_t i = 0; i < kDraws; ++i) {
    double z = s.normal();
    st.add(z);
    sample.push_back(z);
  }
  CHECK(std::abs(st.mean) < 3.0 * st.se());
  CHECK(std::abs(st.variance() - 1.0) < 0.01);
  CHECK(ks_statistic(sample, normal_cdf) < 0.01);
}

TEST_CASE("normal_pair components are independent standard normals") {
  RngStream s = new_stream(13, 0);
  const std::size_t kDraws = 200000;
  std::vector<double> xs(kDraws), ys(kDraws);
  RunningStats sx, sy;
  for (std::size_t i = 0; i < kDraws; ++i) {
    double a = 0.0, b = 0.0;
    s.normal_pair(a, b);
    xs[i] = a;
    ys[i] = b;
    sx.add(a);
    sy.add(b);
  }
  CHECK(std::abs(sx.mean) < 3.0 * sx.se());
  CHECK(std::abs(sy.mean) < 3.0 * sy.se());
  CHECK(std::abs(sx.variance() - 1.0) < 0.02);
  CHECK(std::abs(sy.variance() - 1.0) < 0.02);
  CHECK(std::abs(pearson_corr(xs, ys)) < 0.01);
}

TEST_CASE("exponential sampler moments and KS") {
  RngStream s = new_stream(14, 0);
  const std::size_t kDraws = 400000;
  RunningStats st;
  std::vector<double> sample;
  sample.reserve(kDraws);
  for (std::size_t i = 0; i < kDraws; ++i) {
    double e = s.exponential();
    CHECK(e >= 0.0);
    st.add(e);
    sample.push_back(e);
  }
  CHECK(std::abs(st.mean - 1.0) < 3.0 * st.se());
  CHECK(std::abs(st.variance() - 1.0) < 0.02);
  CHECK(ks_statistic(sample, [](double x) { return -std::expm1(-x); }) < 0.01);
}

TEST_CASE("gamma sampler matches Gamma(shape) moments and KS across shapes") {
  for (double shape : {0.5, 1.0, 3.7, 48.0}) {
    RngStream s = new_stream(15, static_cast<std::uint64_t>(shape * 10));
    const std::size_t kDraws = 200000;
    RunningStats st;
    std::vector<double> sample;
    sample.reserve(kDraws);
    for (std::size_t i = 0; i < kDraws; ++i) {
      double g = sample_gamma(s, shape);
      CHECK(g > 0.0);
      st.add(g);
      sample.push_back(g);
    }
    CHECK(std::abs(st.mean - shape) < 3.0 * st.se());
    // Var SE ~ sqrt((m4 - var^2)/n); a relative 5% band is > 5 SE here.
    CHECK(std::abs(st.variance() - shape) < 0.05 * shape + 0.01);
    double ks = ks_statistic(
        sample, [shape](double x) { return regularized_gamma_p(shape, x); });
    CHECK(ks < 0.01);
  }
}

TEST_CASE("poisson count sampler matches Poisson moments") {
  for (double lambda : {0.5, 2.0, 10.0}) {
    RngStream s = new_stream(16, static_cast<std::uint64_t>(lambda * 4));
    const std::size_t kDraws = 200000;
    RunningStats st;
    for (std::size_t i = 0; i < kDraws; ++i) {
      st.add(static_cast<double>(sample_poisson_count(s, lambda)));
    }
    CHECK(std::abs(st.mean - lambda) < 3.0 * st.se());
    CHECK(std::abs(st.variance() - lambda) < 0.05 * lambda + 0.01);
  }
  RngStream s = new_stream(16, 99);
  CHECK(sample_poisson_count(s, 0.0) == 0);
}

TEST_CASE("verblunsky coefficients live strictly inside the unit disc") {
  RngStream s = new_stream(17, 0);
  for (std::size_t k = 0; k < 64; ++k) {
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
      Verblunsky v = sample_verblunsky(s, k, beta);
      CHECK(v.k == k);
      CHECK(v.beta == beta);
      CHECK(std::abs(v.gamma) > 0.0);
      CHECK(std::abs(v.gamma) < 1.0);
    }
  }
}

TEST_CASE("verblunsky modulus moment matches the Beta(1,b) mean") {
  const std::size_t kDraws = 1000000;
  struct Case {
    std::size_t k;
    double beta;
  } cases[] = {{0, 2.0}, {4, 2.0}, {4, 1.0}, {9, 4.0}};
  for (const auto& c : cases) {
    RngStream s = new_stream(18, c.k + 100 * static_cast<std::uint64_t>(c.beta));
    RunningStats st;
    for (std::size_t i = 0; i < kDraws; ++i) {
      Verblunsky v = sample_verblunsky(s, c.k, c.beta);
      st.add(std::norm(v.gamma));
    }
    double b = c.beta * (static_cast<double>(c.k) + 1.0) / 2.0;
    CHECK(std::abs(st.mean - 1.0 / (1.0 + b)) < 3.0 * st.se());
  }
}

TEST_CASE("verblunsky phase is uniform and modulus law is Beta(1,b)") {
  const std::size_t kDraws = 1000000;
  RngStream s = new_stream(19, 0);
  std::vector<double> phase, mod2;
  phase.reserve(kDraws);
  mod2.reserve(kDraws);
  const std::size_t k = 3;
  const double beta = 2.0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    Verblunsky v = sample_verblunsky(s, k, beta);
    phase.push_back(std::arg(v.gamma));  // (-pi, pi]
    mod2.push_back(std::norm(v.gamma));
  }
  double ks_phase = ks_statistic(
      phase, [](double x) { return (x + kPi) / kTwoPi; });
  CHECK(ks_phase < 0.01);
  double b = beta * (static_cast<double>(k) + 1.0) / 2.0;
  CHECK(ks_statistic(mod2, [b](double x) { return beta1b_cdf(x, b); }) < 0.01);
}

TEST_CASE("complex gaussian has unit second moment, zero mean, independent parts") {
  RngStream s = new_stream(20, 0);
  const std::size_t kDraws = 1000000;
  RunningStats norm2, re, im;
  std::vector<double> xs, ys, n2;
  xs.reserve(kDraws);
  ys.reserve(kDraws);
  n2.reserve(kDraws);
  for (std::size_t i = 0; i < kDraws; ++i) {
    cplx z = sample_std_complex_gaussian(s);
    norm2.add(std::norm(z));
    re.add(z.real());
    im.add(z.imag());
    xs.push_back(z.real());
    ys.push_back(z.imag());
    n2.push_back(std::norm(z));
  }
  CHECK(std::abs(norm2.mean - 1.0) < 3.0 * norm2.se());
  CHECK(std::abs(re.mean) < 3.0 * re.se());
  CHECK(std::abs(im.mean) < 3.0 * im.se());
  CHECK(std::abs(pearson_corr(xs, ys)) < 0.01);
  // |Z|^2 ~ Exp(1) exactly under this construction.
  CHECK(ks_statistic(n2, [](double x) { return -std::expm1(-x); }) < 0.01);
}

TEST_CASE("gamma decomposition reconstructs the verblunsky law") {
  const std::size_t kDraws = 1000000;
  const std::size_t j = 5;
  const double beta = 2.0;
  RngStream s = new_stream(21, 0);
  RunningStats gam_a, z2;
  std::vector<double> mod2;
  mod2.reserve(kDraws);
  for (std::size_t i = 0; i < kDraws; ++i) {
    GammaDecomposition d = sample_gamma_decomposition(s, j, beta);
    gam_a.add(d.gamma_a);
    z2.add(std::norm(d.z));
    double m2 = std::norm(d.z) / (std::norm(d.z) + d.gamma_a);
    mod2.push_back(m2);
  }
  double b = beta * (static_cast<double>(j) + 1.0) / 2.0;
  CHECK(std::abs(gam_a.mean - b) < 3.0 * gam_a.se());
  CHECK(std::abs(z2.mean - 1.0) < 3.0 * z2.se());
  CHECK(ks_statistic(mod2, [b](double x) { return beta1b_cdf(x, b); }) < 0.01);
}

TEST_CASE("invalid beta is rejected") {
  RngStream s = new_stream(22, 0);
  CHECK_THROWS_AS(sample_verblunsky(s, 0, 0.0), ConfigError);
  CHECK_THROWS_AS(sample_verblunsky(s, 0, -1.0), ConfigError);
  CHECK_THROWS_AS(sample_gamma_decomposition(s, 0, 0.0), ConfigError);
}
