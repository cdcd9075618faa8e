#pragma once

// Braid words over n strands. Letters are signed ints: +i is sigma_i,
// -i is its inverse. Words are plain values; every function here is pure.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace braidnav {

struct BraidWord {
  int n = 1;
  std::vector<int> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  bool operator==(const BraidWord&) const = default;
};

// mapping[k] (0-based k) is the final 1-based position of the strand that
// starts at position k+1.
using Permutation = std::vector<int>;

inline void check_word(const BraidWord& w) {
  if (w.n < 1) throw std::invalid_argument("braid: strand count must be >= 1");
  for (int l : w.letters) {
    if (l == 0 || std::abs(l) > w.n - 1)
      throw std::invalid_argument("braid: letter " + std::to_string(l) +
                                  " out of range for n=" + std::to_string(w.n));
  }
}

inline BraidWord make_word(int n, std::vector<int> letters) {
  BraidWord w{n, std::move(letters)};
  check_word(w);
  return w;
}

inline BraidWord identity(int n) { return BraidWord{n, {}}; }

inline BraidWord compose(const BraidWord& a, const BraidWord& b) {
  if (a.n != b.n) throw std::invalid_argument("compose: strand count mismatch");
  BraidWord r{a.n, a.letters};
  r.letters.insert(r.letters.end(), b.letters.begin(), b.letters.end());
  return r;
}

inline BraidWord inverse(const BraidWord& w) {
  BraidWord r{w.n, {}};
  r.letters.reserve(w.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) r.letters.push_back(-*it);
  return r;
}

inline Permutation permutation_of(const BraidWord& w) {
  std::vector<int> at(w.n);  // at[p] = strand sitting at position p
  for (int p = 0; p < w.n; ++p) at[p] = p;
  for (int l : w.letters) {
    int i = std::abs(l) - 1;
    std::swap(at[i], at[i + 1]);
  }
  Permutation m(w.n);
  for (int p = 0; p < w.n; ++p) m[at[p]] = p + 1;
  return m;
}

// (outer o inner)(k) = outer(inner(k))
inline Permutation compose_perm(const Permutation& outer, const Permutation& inner) {
  Permutation r(inner.size());
  for (std::size_t k = 0; k < inner.size(); ++k) r[k] = outer[inner[k] - 1];
  return r;
}

inline Permutation identity_perm(int n) {
  Permutation p(n);
  for (int k = 0; k < n; ++k) p[k] = k + 1;
  return p;
}

inline std::vector<int> free_reduce(const std::vector<int>& letters) {
  std::vector<int> out;
  out.reserve(letters.size());
  for (int l : letters) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

inline BraidWord free_reduce(const BraidWord& w) { return BraidWord{w.n, free_reduce(w.letters)}; }

namespace detail {

inline bool commutes(int x, int y) { return std::abs(std::abs(x) - std::abs(y)) > 1; }

// Cancel x ... x^-1 pairs whose separating letters all commute with x.
inline bool commute_cancel(std::vector<int>& w) {
  bool changed = false;
  for (std::size_t i = 0; i < w.size();) {
    bool hit = false;
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      if (w[j] == -w[i]) {
        w.erase(w.begin() + j);
        w.erase(w.begin() + i);
        hit = true;
        break;
      }
      if (!commutes(w[i], w[j])) break;
    }
    if (hit) {
      changed = true;
      w = free_reduce(w);
      i = 0;
    } else {
      ++i;
    }
  }
  return changed;
}

// Length-preserving rewrite of the triple starting at k, if one applies:
//   x^a y^a x^a   -> y^a x^a y^a
//   x^a y^b x^-a  -> y^-a x^b y^a
// with |x|, |y| adjacent generators.
inline bool rewrite_triple(std::vector<int>& w, std::size_t k) {
  if (k + 2 >= w.size()) return false;
  int p = w[k], q = w[k + 1], r = w[k + 2];
  int x = std::abs(p), y = std::abs(q);
  if (std::abs(x - y) != 1 || std::abs(r) != x) return false;
  int a = p > 0 ? 1 : -1, b = q > 0 ? 1 : -1, c = r > 0 ? 1 : -1;
  if (a == b && b == c) {
    w[k] = a * y;
    w[k + 1] = a * x;
    w[k + 2] = a * y;
    return true;
  }
  if (c == -a) {
    w[k] = -a * y;
    w[k + 1] = b * x;
    w[k + 2] = a * y;
    return true;
  }
  return false;
}

}  // namespace detail

// Bounded greedy shortening. Never lengthens, always returns an equivalent word.
inline BraidWord relation_simplify(const BraidWord& w, int max_passes = 16) {
  if (max_passes < 1) throw std::invalid_argument("relation_simplify: max_passes must be >= 1");
  std::vector<int> cur = free_reduce(w.letters);
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = detail::commute_cancel(cur);
    if (!improved) {
      for (std::size_t k = 0; k + 2 < cur.size(); ++k) {
        std::vector<int> cand = cur;
        if (!detail::rewrite_triple(cand, k)) continue;
        cand = free_reduce(cand);
        detail::commute_cancel(cand);
        if (cand.size() < cur.size()) {
          cur = std::move(cand);
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
  }
  return BraidWord{w.n, cur};
}

// Text form: "n=4: 3 1 -2 -3 -1". The identity is "n=4:".
inline std::string to_string(const BraidWord& w) {
  std::string s = "n=" + std::to_string(w.n) + ":";
  for (int l : w.letters) s += " " + std::to_string(l);
  return s;
}

inline BraidWord parse_word(const std::string& text) {
  auto fail = [&](std::size_t pos, const std::string& why) {
    throw std::invalid_argument("parse error at position " + std::to_string(pos) + ": " + why);
  };
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto read_int = [&](long& out) {
    std::size_t start = i;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
    std::size_t digits = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == digits) fail(start, "expected integer");
    if (i - digits > 9) fail(start, "integer too large");
    out = std::stol(text.substr(start, i - start));
  };
  skip_ws();
  if (text.compare(i, 2, "n=") != 0) fail(i, "expected 'n='");
  i += 2;
  long n = 0;
  read_int(n);
  if (n < 1) fail(i, "strand count must be >= 1");
  skip_ws();
  if (i >= text.size() || text[i] != ':') fail(i, "expected ':'");
  ++i;
  BraidWord w{static_cast<int>(n), {}};
  for (;;) {
    skip_ws();
    if (i >= text.size()) break;
    std::size_t start = i;
    long l = 0;
    read_int(l);
    if (l == 0 || std::labs(l) > n - 1) fail(start, "letter out of range");
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
      fail(i, "unexpected character");
    w.letters.push_back(static_cast<int>(l));
  }
  return w;
}

}  // namespace braidnav
