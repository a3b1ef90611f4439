#pragma once

#include <cmath>
#include <cstdint>

#include "cbe/common.hpp"

namespace cbe {

// 64-bit permuted-congruential generator (XSL-RR 128/64 variant) with one
// independent sequence per stream id.  Distinct stream ids select distinct odd
// LCG increments, which is the documented stream-separation mechanism of this
// generator family; the increment is derived through a bijective mixer so any
// two distinct ids give distinct sequences.  The 128-bit LCG supports O(log n)
// jump-ahead, which backs the position/fast-forward semantics below.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), position_(0) {
    inc_ = (static_cast<u128>(mix64(stream_id ^ 0xda3e39cb94b95bdbULL)) << 1) | 1u;
    state_ = 0;
    bump();
    state_ += (static_cast<u128>(mix64(seed)) << 64) | mix64(seed ^ 0x9e3779b97f4a7c15ULL);
    bump();
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  // Number of raw 64-bit outputs drawn so far.
  std::uint64_t position() const { return position_; }

  std::uint64_t next_u64() {
    bump();
    ++position_;
    std::uint64_t xored = static_cast<std::uint64_t>(state_ ^ (state_ >> 64));
    unsigned rot = static_cast<unsigned>(state_ >> 122);
    return (xored >> rot) | (xored << ((-rot) & 63u));
  }

  // Jump the stream forward by n raw outputs in O(log n).
  void advance(std::uint64_t n) {
    u128 cur_mult = kMult;
    u128 cur_plus = inc_;
    u128 acc_mult = 1;
    u128 acc_plus = 0;
    std::uint64_t delta = n;
    while (delta > 0) {
      if (delta & 1u) {
        acc_mult *= cur_mult;
        acc_plus = acc_plus * cur_mult + cur_plus;
      }
      cur_plus = (cur_mult + 1) * cur_plus;
      cur_mult *= cur_mult;
      delta >>= 1;
    }
    state_ = acc_mult * state_ + acc_plus;
    position_ += n;
  }

  // Uniform on [0, 1); consumes one raw draw.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform angle on [0, 2*pi); one raw draw.
  double uniform_angle() { return kTwoPi * uniform01(); }

  // Exp(1); one raw draw.
  double exponential() { return -std::log1p(-uniform01()); }

  // Standard normal via Box-Muller; always consumes exactly two raw draws.
  double normal() {
    double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Independent standard-normal pair from one Box-Muller transform (two draws).
  void normal_pair(double& a, double& b) {
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    a = r * std::cos(kTwoPi * u2);
    b = r * std::sin(kTwoPi * u2);
  }

 private:
  using u128 = unsigned __int128;

  static constexpr u128 kMult =
      (static_cast<u128>(0x2360ed051fc65da4ULL) << 64) | 0x4385df649fccf645ULL;

  static std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  void bump() { state_ = state_ * kMult + inc_; }

  u128 state_ = 0;
  u128 inc_ = 1;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t position_ = 0;
};

inline RngStream new_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RngStream(seed, stream_id);
}

// One Verblunsky coefficient: rotationally invariant complex gamma with
// |gamma|^2 ~ Beta(1, beta*(k+1)/2).
struct Verblunsky {
  std::size_t k = 0;
  double beta = 2.0;
  cplx gamma{0.0, 0.0};
};

// Gamma(shape) with unit scale; Marsaglia-Tsang squeeze/rejection for
// shape >= 1 (acceptance probability > 0.95, squeeze accepts the bulk without
// a log), boosted by u^{1/shape} for shape < 1.
double sample_gamma(RngStream& s, double shape);

// Poisson(lambda) by counting unit-exponential arrivals in [0, lambda];
// exact for all lambda, O(lambda) draws (fine for the intensities used here).
std::uint64_t sample_poisson_count(RngStream& s, double lambda);

// Z = X + iY with X, Y iid N(0, 1/2); realized as sqrt(E) e^{i Theta} with
// E ~ Exp(1), Theta uniform, so that |Z|^2 ~ Exp(1) exactly.
cplx sample_std_complex_gaussian(RngStream& s);

// gamma_k = sqrt(E/(E + G)) e^{i Theta} with E ~ Exp(1),
// G ~ Gamma(beta*(k+1)/2), Theta ~ Unif[0, 2*pi), all independent.
Verblunsky sample_verblunsky(RngStream& s, std::size_t k, double beta);

// The decomposition behind sample_verblunsky: returns (Z, Gamma_a) such that
// Z/sqrt(|Z|^2 + Gamma_a) has the Verblunsky law; E Gamma_a = beta*(k+1)/2.
struct GammaDecomposition {
  cplx z;
  double gamma_a;
};
GammaDecomposition sample_gamma_decomposition(RngStream& s, std::size_t k, double beta);

}  // namespace cbe
