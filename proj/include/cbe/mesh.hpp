#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cbe/common.hpp"

namespace cbe {

// An angular mesh on [0, 2*pi): a strictly increasing list of angles, plus
// optional arc bookkeeping when the mesh was built from an arc decomposition.
struct Mesh {
  std::vector<double> theta;

  // Arc bookkeeping (empty for plain uniform meshes).  Arc j covers the
  // half-open angular interval [arc_lo[j], arc_hi[j]) and owns mesh indices
  // [arc_begin[j], arc_begin[j+1]).
  std::vector<std::size_t> arc_begin;  // size = arc count + 1 when nonempty
  std::vector<double> arc_lo;
  std::vector<double> arc_hi;

  std::size_t size() const { return theta.size(); }
  std::size_t arc_count() const {
    return arc_begin.empty() ? 0 : arc_begin.size() - 1;
  }

  // Uniform mesh: count points at pitch 2*pi/count starting at 0.
  static Mesh uniform(std::size_t count);

  // Arc mesh for the extremal-process decomposition: the circle is divided
  // into ceil(n/k1) arcs of width 2*pi*k1/n, and each arc carries the global
  // lattice of pitch 2*pi/(4*k5*n) intersected with the arc.  When trim > 0,
  // a band of that angular width is removed from both ends of each arc
  // (closed interval [lo+trim, hi-trim]) before intersecting with the
  // lattice; with trim == 0 the arcs are half-open [lo, hi).
  static Mesh arcs(std::uint64_t n, std::uint64_t k1, std::uint64_t k5,
                   double trim = 0.0);

  // Sanity: strictly increasing angles inside [0, 2*pi).
  void validate() const;
};

}  // namespace cbe
