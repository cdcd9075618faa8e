#pragma once

// Integer loop coordinates for multicurves in the N-punctured disk.
//
// coords interleave (a_1, b_1, ..., a_{N-2}, b_{N-2}). With mu the minimal
// crossings of the vertical rays above/below puncture i+1 and nu_i those of
// the vertical line between punctures i and i+1:
//   a_i = (mu_below - mu_above) / 2,   b_i = (nu_i - nu_{i+1}) / 2.
// A round loop around punctures p..q has a = 0, b_{p-1} = -1, b_{q-1} = +1
// (terms with an index outside 1..N-2 are dropped).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace braidnav {

using BigInt = boost::multiprecision::cpp_int;

struct LoopCoordinates {
  int n_punctures = 3;
  std::vector<BigInt> coords;

  std::size_t pairs() const { return coords.size() / 2; }
  const BigInt& a(std::size_t i) const { return coords[2 * i]; }
  const BigInt& b(std::size_t i) const { return coords[2 * i + 1]; }
  BigInt& a(std::size_t i) { return coords[2 * i]; }
  BigInt& b(std::size_t i) { return coords[2 * i + 1]; }
  bool operator==(const LoopCoordinates&) const = default;
};

inline LoopCoordinates zero_loops(int n_punctures) {
  if (n_punctures < 3) throw std::invalid_argument("loop coordinates need at least 3 punctures");
  return LoopCoordinates{n_punctures, std::vector<BigInt>(2 * (n_punctures - 2))};
}

// Loop enclosing punctures p..q (1-based, 1 <= p < q <= N, not all of them).
inline LoopCoordinates round_loop(int n_punctures, int p, int q) {
  if (p < 1 || q > n_punctures || p >= q || (p == 1 && q == n_punctures))
    throw std::invalid_argument("round_loop: bad puncture range");
  LoopCoordinates l = zero_loops(n_punctures);
  if (p >= 2) l.b(p - 2) -= 1;
  if (q <= n_punctures - 1) l.b(q - 2) += 1;
  return l;
}

inline LoopCoordinates operator+(const LoopCoordinates& x, const LoopCoordinates& y) {
  if (x.n_punctures != y.n_punctures) throw std::invalid_argument("loop sum: puncture mismatch");
  LoopCoordinates r = x;
  for (std::size_t k = 0; k < r.coords.size(); ++k) r.coords[k] += y.coords[k];
  return r;
}

namespace detail {
inline BigInt pos(const BigInt& x) { return x > 0 ? x : BigInt(0); }
inline BigInt neg(const BigInt& x) { return x < 0 ? x : BigInt(0); }
}  // namespace detail

// Image of the multicurve under one half twist (+i: sigma_i, -i: inverse).
inline LoopCoordinates apply_letter(const LoopCoordinates& l, int letter) {
  using detail::neg;
  using detail::pos;
  const int N = l.n_punctures;
  const int i = std::abs(letter);
  if (letter == 0 || i > N - 1)
    throw std::invalid_argument("apply_letter: generator " + std::to_string(letter) +
                                " out of range for " + std::to_string(N) + " punctures");
  LoopCoordinates r = l;
  if (i == 1) {
    const BigInt& a = l.a(0);
    const BigInt& b = l.b(0);
    BigInt b2 = letter > 0 ? BigInt(-a + pos(b)) : BigInt(a + pos(b));
    BigInt a2 = letter > 0 ? BigInt(b - pos(b2)) : BigInt(-b + pos(b2));
    r.a(0) = std::move(a2);
    r.b(0) = std::move(b2);
  } else if (i == N - 1) {
    const std::size_t k = N - 3;
    const BigInt& a = l.a(k);
    const BigInt& b = l.b(k);
    BigInt b2 = letter > 0 ? BigInt(-a + neg(b)) : BigInt(a + neg(b));
    BigInt a2 = letter > 0 ? BigInt(b - neg(b2)) : BigInt(-b + neg(b2));
    r.a(k) = std::move(a2);
    r.b(k) = std::move(b2);
  } else {
    const std::size_t j = i - 2, k = i - 1;
    const BigInt &a1 = l.a(j), &b1 = l.b(j), &a2 = l.a(k), &b2 = l.b(k);
    if (letter > 0) {
      BigInt c = a1 - a2 + pos(b2) - neg(b1);
      r.a(j) = a1 + pos(b1) + pos(BigInt(pos(b2) - c));
      r.b(j) = b2 - pos(c);
      r.a(k) = a2 + neg(b2) + neg(BigInt(neg(b1) + c));
      r.b(k) = b1 + pos(c);
    } else {
      BigInt d = a1 - a2 - pos(b2) + neg(b1);
      r.a(j) = a1 - pos(b1) - pos(BigInt(pos(b2) + d));
      r.b(j) = b2 + neg(d);
      r.a(k) = a2 - neg(b2) - neg(BigInt(neg(b1) - d));
      r.b(k) = b1 - neg(d);
    }
  }
  return r;
}

inline LoopCoordinates apply_word(LoopCoordinates l, const std::vector<int>& letters) {
  for (int g : letters) l = apply_letter(l, g);
  return l;
}

// Crossings with the vertical lines between consecutive punctures, nu_1..nu_{N-1}.
inline std::vector<BigInt> vertical_crossings(const LoopCoordinates& l) {
  const std::size_t m = l.pairs();
  BigInt best = 0, cum = 0;
  for (std::size_t i = 0; i < m; ++i) {
    BigInt v = abs(l.a(i)) + detail::pos(l.b(i)) + cum;
    if (i == 0 || v > best) best = v;
    cum += l.b(i);
  }
  std::vector<BigInt> nu;
  nu.reserve(m + 1);
  nu.push_back(2 * best);
  for (std::size_t i = 0; i < m; ++i) nu.push_back(nu.back() - 2 * l.b(i));
  return nu;
}

// Crossings with the axis segments strictly between punctures 1 and N.
inline BigInt inner_axis_crossings(const LoopCoordinates& l) {
  const std::size_t m = l.pairs();
  BigInt s = 0;
  for (std::size_t seg = 0; seg <= m; ++seg) {  // segment between punctures seg+1 and seg+2
    BigInt left = seg == 0 ? BigInt(0) : l.a(seg - 1);
    BigInt right = seg == m ? BigInt(0) : l.a(seg);
    s += abs(right - left);
    if (seg > 0) s += detail::pos(l.b(seg - 1));
    if (seg < m) s += detail::pos(BigInt(-l.b(seg)));
  }
  return s;
}

// Minimal crossings with the whole horizontal axis.
inline BigInt axis_crossings(const LoopCoordinates& l) {
  auto nu = vertical_crossings(l);
  return nu.front() / 2 + nu.back() / 2 + inner_axis_crossings(l);
}

}  // namespace braidnav
