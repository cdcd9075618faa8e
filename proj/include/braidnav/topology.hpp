#pragma once

// From timed planar trajectories to braid words.
//
// Agents are ordered along the sweep axis eta; every swap of two
// neighbours is a crossing, signed by which of the two sits higher along
// the depth axis nu at that moment.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "braid.hpp"

namespace braidnav {

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

struct Sample {
  double t = 0.0, x = 0.0, y = 0.0;
};

struct Trajectory {
  std::string agent_id;
  std::vector<Sample> samples;
};

// All agents sampled on one shared, strictly increasing time grid.
struct SystemTrajectory {
  std::vector<std::string> ids;
  std::vector<double> t;
  std::vector<std::vector<Vec2>> pos;  // pos[agent][k]

  int agents() const { return static_cast<int>(ids.size()); }
  double t_start() const { return t.front(); }
  double t_end() const { return t.back(); }
};

struct ProjectionFrame {
  Vec2 eta{1.0, 0.0};
  Vec2 nu{0.0, 1.0};
};

inline void check_frame(const ProjectionFrame& f) {
  if (std::abs(f.eta.norm() - 1.0) > 1e-9 || std::abs(f.nu.norm() - 1.0) > 1e-9 ||
      std::abs(f.eta.dot(f.nu)) > 1e-9)
    throw std::invalid_argument("projection frame must be orthonormal");
}

struct CrossingEvent {
  double time = 0.0;
  int slot = 0;
  int sign = 0;
  std::pair<std::string, std::string> agents;
};

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kRankTieEps = 1e-9;

inline void check_system(const SystemTrajectory& xs) {
  if (xs.t.size() < 2) throw std::invalid_argument("system trajectory needs >= 2 time samples");
  for (std::size_t k = 1; k < xs.t.size(); ++k)
    if (!(xs.t[k] > xs.t[k - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  if (xs.pos.size() != xs.ids.size()) throw std::invalid_argument("agent count mismatch");
  for (const auto& p : xs.pos)
    if (p.size() != xs.t.size()) throw std::invalid_argument("agent sample count mismatch");
  std::set<std::string> uniq(xs.ids.begin(), xs.ids.end());
  if (uniq.size() != xs.ids.size()) throw std::invalid_argument("duplicate agent id");
}

inline Vec2 interpolate(const Trajectory& tr, double t) {
  const auto& s = tr.samples;
  if (t <= s.front().t) return {s.front().x, s.front().y};
  if (t >= s.back().t) return {s.back().x, s.back().y};
  auto it = std::lower_bound(s.begin(), s.end(), t, [](const Sample& a, double v) { return a.t < v; });
  const Sample& hi = *it;
  const Sample& lo = *(it - 1);
  double f = (t - lo.t) / (hi.t - lo.t);
  return {lo.x + f * (hi.x - lo.x), lo.y + f * (hi.y - lo.y)};
}

// Shared grid: every sample time of every agent inside the common window.
inline SystemTrajectory make_system(const std::vector<Trajectory>& trs) {
  if (trs.empty()) throw std::invalid_argument("make_system: no trajectories");
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& tr : trs) {
    if (tr.samples.size() < 2) throw std::invalid_argument("trajectory " + tr.agent_id + " has < 2 samples");
    for (std::size_t k = 1; k < tr.samples.size(); ++k)
      if (!(tr.samples[k].t > tr.samples[k - 1].t))
        throw std::invalid_argument("trajectory " + tr.agent_id + " has non-increasing time");
    lo = std::max(lo, tr.samples.front().t);
    hi = std::min(hi, tr.samples.back().t);
  }
  if (!(hi > lo)) throw std::invalid_argument("make_system: trajectories do not overlap in time");
  std::vector<double> grid;
  for (const auto& tr : trs)
    for (const auto& s : tr.samples)
      if (s.t >= lo && s.t <= hi) grid.push_back(s.t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  SystemTrajectory xs;
  xs.t = grid;
  for (const auto& tr : trs) {
    xs.ids.push_back(tr.agent_id);
    std::vector<Vec2> p;
    p.reserve(grid.size());
    for (double t : grid) p.push_back(interpolate(tr, t));
    xs.pos.push_back(std::move(p));
  }
  check_system(xs);
  return xs;
}

// Maps time to [0, 1], eta to [1, n] and nu to [-1, 1]; the first and last
// samples snap to (start rank, 0) and (final rank, 0). Output x is eta, y is nu.
inline SystemTrajectory normalize(const SystemTrajectory& xs, const ProjectionFrame& frame);

// (p_s, p_d): 1-based start and final rank of each agent along eta.
inline std::pair<Permutation, Permutation> rank_permutations(const SystemTrajectory& xs,
                                                             const ProjectionFrame& frame = {});

namespace detail {

inline std::vector<int> rank_order(const std::vector<double>& eta) {
  std::vector<int> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(eta[a] - eta[b]) <= kRankTieEps) return a < b;
    return eta[a] < eta[b];
  });
  return order;
}

// Position-of-agent from an order (position -> agent).
inline Permutation ranks_from_order(const std::vector<int>& order) {
  Permutation r(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) r[order[p]] = static_cast<int>(p) + 1;
  return r;
}

}  // namespace detail

// One swap of agents i < j along eta. nu_sign is the sign of nu_i - nu_j at
// the swap; 0 means the two strands meet.
struct PairCrossing {
  double t = 0.0;
  int i = 0, j = 0;
  int nu_sign = 0;
};

// Swaps of agents i < j for motion that is linear between consecutive times.
// A tie within kRankTieEps keeps the previous side, so strands that touch
// and part on the same side (two agents stopping at a shared end point,
// say) do not swap. A tie at the first sample counts as "i before j".
template <class EtaI, class EtaJ, class NuI, class NuJ>
void pair_crossings(const std::vector<double>& t, EtaI eta_i, EtaJ eta_j, NuI nu_i, NuJ nu_j, int i, int j,
                    std::vector<PairCrossing>& out) {
  auto side = [](double d, int prev) { return d > kRankTieEps ? 1 : (d < -kRankTieEps ? -1 : prev); };
  double d0 = eta_i(0) - eta_j(0);
  int s0 = side(d0, -1);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    double d1 = eta_i(k + 1) - eta_j(k + 1);
    int s1 = side(d1, s0);
    if (s1 != s0) {
      double f;
      if (std::abs(d0) <= kRankTieEps)
        f = 0.0;
      else if (std::abs(d1) <= kRankTieEps)
        f = 1.0;
      else
        f = std::clamp(d0 / (d0 - d1), 0.0, 1.0);
      double tc = t[k] + f * (t[k + 1] - t[k]);
      double dv = (1 - f) * (nu_i(k) - nu_j(k)) + f * (nu_i(k + 1) - nu_j(k + 1));
      int sg = dv > 1e-12 ? 1 : (dv < -1e-12 ? -1 : 0);
      out.push_back({tc, i, j, sg});
    }
    d0 = d1;
    s0 = s1;
  }
}

// Orders swaps in time and turns them into letters. Equal-time swaps of
// disjoint neighbour pairs go in ascending slot order.
inline std::pair<BraidWord, std::vector<CrossingEvent>> assemble_braid(
    const std::vector<int>& start_order, std::vector<PairCrossing> events,
    const std::vector<std::string>* ids = nullptr, bool record = true) {
  const int n = static_cast<int>(start_order.size());
  std::sort(events.begin(), events.end(), [](const PairCrossing& a, const PairCrossing& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<int> order = start_order;
  std::vector<int> where(n);
  for (int p = 0; p < n; ++p) where[order[p]] = p;
  BraidWord w{n, {}};
  std::vector<CrossingEvent> log;
  auto name = [&](int a) { return ids ? (*ids)[a] : std::to_string(a + 1); };
  std::size_t g = 0;
  while (g < events.size()) {
    std::size_t h = g + 1;
    while (h < events.size() && events[h].t - events[g].t <= 1e-12) ++h;
    std::vector<std::pair<int, const PairCrossing*>> group;
    for (std::size_t e = g; e < h; ++e) {
      int pi = where[events[e].i], pj = where[events[e].j];
      group.push_back({std::min(pi, pj), &events[e]});
    }
    std::sort(group.begin(), group.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (group.size() > 1) {
      std::set<int> seen;
      for (const auto& [slot, ev] : group) {
        if (!seen.insert(ev->i).second || !seen.insert(ev->j).second)
          throw ExtractionError("simultaneous crossings share agent " + name(ev->i) + " or " + name(ev->j) +
                                " at t=" + std::to_string(ev->t));
      }
    }
    for (const auto& [slot0, ev] : group) {
      int pi = where[ev->i], pj = where[ev->j];
      if (std::abs(pi - pj) != 1)
        throw ExtractionError("agents " + name(ev->i) + " and " + name(ev->j) +
                              " swap while not adjacent at t=" + std::to_string(ev->t));
      if (ev->nu_sign == 0)
        throw ExtractionError("agents " + name(ev->i) + " and " + name(ev->j) + " meet at t=" +
                              std::to_string(ev->t));
      int lower = pi < pj ? ev->i : ev->j;
      int slot = std::min(pi, pj) + 1;
      int sign = lower == ev->i ? ev->nu_sign : -ev->nu_sign;
      w.letters.push_back(sign * slot);
      if (record) log.push_back({ev->t, slot, sign, {name(order[slot - 1]), name(order[slot])}});
      std::swap(order[slot - 1], order[slot]);
      where[order[slot - 1]] = slot - 1;
      where[order[slot]] = slot;
    }
    g = h;
  }
  return {w, log};
}

inline std::pair<BraidWord, std::vector<CrossingEvent>> extract_braid(const SystemTrajectory& xs,
                                                                      const ProjectionFrame& frame = {}) {
  check_system(xs);
  check_frame(frame);
  const int n = xs.agents();
  if (n < 1) throw std::invalid_argument("extract_braid: no agents");
  const std::size_t K = xs.t.size();
  std::vector<std::vector<double>> eta(n, std::vector<double>(K)), nu(n, std::vector<double>(K));
  for (int a = 0; a < n; ++a)
    for (std::size_t k = 0; k < K; ++k) {
      eta[a][k] = xs.pos[a][k].dot(frame.eta);
      nu[a][k] = xs.pos[a][k].dot(frame.nu);
    }
  std::vector<double> e0(n);
  for (int a = 0; a < n; ++a) e0[a] = eta[a][0];
  std::vector<int> start = detail::rank_order(e0);
  std::vector<PairCrossing> events;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pair_crossings(
          xs.t, [&](std::size_t k) { return eta[i][k]; }, [&](std::size_t k) { return eta[j][k]; },
          [&](std::size_t k) { return nu[i][k]; }, [&](std::size_t k) { return nu[j][k]; }, i, j, events);
  return assemble_braid(start, std::move(events), &xs.ids);
}

inline std::pair<Permutation, Permutation> rank_permutations(const SystemTrajectory& xs,
                                                             const ProjectionFrame& frame) {
  check_system(xs);
  check_frame(frame);
  const int n = xs.agents();
  std::vector<double> s(n), d(n);
  for (int a = 0; a < n; ++a) {
    s[a] = xs.pos[a].front().dot(frame.eta);
    d[a] = xs.pos[a].back().dot(frame.eta);
  }
  return {detail::ranks_from_order(detail::rank_order(s)), detail::ranks_from_order(detail::rank_order(d))};
}

inline SystemTrajectory normalize(const SystemTrajectory& xs, const ProjectionFrame& frame) {
  check_system(xs);
  check_frame(frame);
  const int n = xs.agents();
  double emin = std::numeric_limits<double>::infinity(), emax = -emin, vmin = emin, vmax = -emin;
  for (const auto& p : xs.pos)
    for (const auto& q : p) {
      double e = q.dot(frame.eta), v = q.dot(frame.nu);
      emin = std::min(emin, e);
      emax = std::max(emax, e);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  if (!(emax > emin)) throw std::invalid_argument("normalize: zero extent along eta");
  if (!(vmax > vmin)) throw std::invalid_argument("normalize: zero extent along nu");
  auto [ps, pd] = rank_permutations(xs, frame);
  SystemTrajectory out;
  out.ids = xs.ids;
  const double t0 = xs.t.front(), span = xs.t.back() - xs.t.front();
  for (double t : xs.t) out.t.push_back((t - t0) / span);
  out.t.back() = 1.0;
  const double scale = n > 1 ? n - 1 : 1;
  for (int a = 0; a < n; ++a) {
    std::vector<Vec2> p;
    p.reserve(xs.t.size());
    for (const auto& q : xs.pos[a]) {
      double rx = (q.dot(frame.eta) - emin) / (emax - emin);
      double ry = (q.dot(frame.nu) - vmin) / (vmax - vmin);
      p.push_back({1.0 + rx * scale, -1.0 + 2.0 * ry});
    }
    p.front() = {static_cast<double>(ps[a]), 0.0};
    p.back() = {static_cast<double>(pd[a]), 0.0};
    out.pos.push_back(std::move(p));
  }
  return out;
}

}  // namespace braidnav
