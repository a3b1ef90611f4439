#pragma once

#include <cstdint>

#include "cbe/common.hpp"

namespace cbe {

// k-th harmonic number: exact summation for k <= 10^6, asymptotic
// log k + gamma + 1/(2k) beyond (error < 1e-8).
double harmonic_number(std::uint64_t k);

enum class BarrierKind {
  kUpperAll,           // high barrier indexed by k:
                       //   H_k + (H_k)^{1/100}                   if H_k <= (1/2) log n
                       //   H_k + (H_n - H_k)^{1/100} - (3/4) log n   otherwise (H_k <= H_n)
  kBanana,             // width-p tube indexed by continuous t in [0, log n]:
                       //   t - t^{1/2 -+ p/(2p+1)}                if t <= (1/2) log n
                       //   t - (log n - t)^{1/2 -+ p/(2p+1)} - (3/4) log log n  otherwise
  kAppendixEnvelope,   // discrete envelope on k in [0, N]:
                       //   -k^{a} if k <= floor(N/2), else -(N-k)^{a} - (3/4) log N,
                       //   a = 1/10 for the upper curve, 9/10 for the lower
};

struct BarrierSpec {
  BarrierKind kind = BarrierKind::kUpperAll;
  std::uint64_t n = 0;   // matrix size (kUpperAll/kBanana) or N (envelope)
  int p = 1;             // banana width parameter, p >= 1
  bool upper = true;     // banana: +-branch; envelope: upper vs lower curve
};

double barrier_value(const BarrierSpec& spec, double t_or_k);

}  // namespace cbe
