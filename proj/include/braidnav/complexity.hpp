#pragma once

// Curve diagrams and the topological complexity index.
//
// The disk holding n agents is modelled with one extra puncture to the
// right of the agents, standing in for the collapsed outer boundary. An arc
// of E runs from the boundary, between two neighbouring agents, back to the
// boundary; in the collapsed model it becomes a loop through the extra
// puncture, which with a_i = 0, b_i = -1 gives the canonical diagram. The
// norm counts crossings of the axis to the left of the extra puncture, twice
// per crossing (both sides of each arc), so norm(E) = 2(n-1).

#include <cmath>
#include <stdexcept>

#include "braid.hpp"
#include "loops.hpp"

namespace braidnav {

inline LoopCoordinates canonical_diagram(int n) {
  if (n < 2) throw std::invalid_argument("canonical_diagram: need at least 2 strands");
  LoopCoordinates l = zero_loops(n + 1);
  for (std::size_t i = 0; i < l.pairs(); ++i) l.b(i) = -1;
  return l;
}

inline BigInt norm(const LoopCoordinates& l) {
  return vertical_crossings(l).front() + 2 * inner_axis_crossings(l);
}

struct ComplexityScore {
  double tc = 0.0;
  BigInt norm_before;
  BigInt norm_after;
};

namespace detail {
inline double log2_big(const BigInt& x) {
  if (x <= 0) throw std::domain_error("log2 of non-positive norm");
  unsigned bits = msb(x);
  if (bits < 900) return std::log2(x.convert_to<double>());
  unsigned shift = bits - 60;
  BigInt top = x >> shift;
  return std::log2(top.convert_to<double>()) + shift;
}
}  // namespace detail

inline ComplexityScore topological_complexity(const BraidWord& w) {
  check_word(w);
  if (w.n < 2) return ComplexityScore{0.0, 0, 0};
  LoopCoordinates e = canonical_diagram(w.n);
  LoopCoordinates d = apply_word(e, w.letters);
  ComplexityScore s;
  s.norm_before = norm(e);
  s.norm_after = norm(d);
  s.tc = detail::log2_big(s.norm_after) - detail::log2_big(s.norm_before);
  return s;
}

// Curves whose joint stabiliser in B_n is trivial: E, every adjacent-pair
// loop of the (n+1)-punctured disk, and one twisted curve.
inline std::vector<LoopCoordinates> probe_loops(int n) {
  std::vector<LoopCoordinates> probes{canonical_diagram(n)};
  const int N = n + 1;
  for (int p = 1; p < N; ++p) probes.push_back(round_loop(N, p, p + 1));
  probes.push_back(apply_word(round_loop(N, 1, 2), {1, -2, 1}));
  return probes;
}

inline bool is_equivalent(const BraidWord& a, const BraidWord& b) {
  if (a.n != b.n) throw std::invalid_argument("is_equivalent: strand count mismatch");
  check_word(a);
  check_word(b);
  if (a.n < 2) return true;
  if (permutation_of(a) != permutation_of(b)) return false;
  BraidWord c = free_reduce(compose(a, inverse(b)));
  if (c.empty()) return true;
  for (const auto& probe : probe_loops(a.n))
    if (apply_word(probe, c.letters) != probe) return false;
  return true;
}

}  // namespace braidnav
