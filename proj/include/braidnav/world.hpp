#pragma once

// Symmetric four-way intersection with right-hand traffic.
//
// Origin is the box centre, x east, y north. The box is the square of side
// 2 * lane_width; each arm adds lane_length of road outside it. Arms are
// numbered counter-clockwise starting from the south, so rotating a path
// by +90 degrees maps arm k onto arm k+1.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "topology.hpp"

namespace braidnav {

enum class Arm { South = 0, East = 1, North = 2, West = 3 };
enum class Maneuver { Left, Straight, Right };

inline constexpr std::array<Maneuver, 3> kManeuvers{Maneuver::Left, Maneuver::Straight, Maneuver::Right};

inline std::string to_string(Arm a) {
  switch (a) {
    case Arm::South: return "south";
    case Arm::East: return "east";
    case Arm::North: return "north";
    case Arm::West: return "west";
  }
  return "?";
}

inline std::string to_string(Maneuver m) {
  switch (m) {
    case Maneuver::Left: return "left";
    case Maneuver::Straight: return "straight";
    case Maneuver::Right: return "right";
  }
  return "?";
}

inline Arm parse_arm(const std::string& s) {
  if (s == "south") return Arm::South;
  if (s == "east") return Arm::East;
  if (s == "north") return Arm::North;
  if (s == "west") return Arm::West;
  throw std::invalid_argument("unknown arm '" + s + "'");
}

inline Maneuver parse_maneuver(const std::string& s) {
  if (s == "left") return Maneuver::Left;
  if (s == "straight") return Maneuver::Straight;
  if (s == "right") return Maneuver::Right;
  throw std::invalid_argument("unknown maneuver '" + s + "'");
}

struct IntersectionMap {
  double lane_length = 50.0;
  double lane_width = 3.6;
  double turn_radius = 5.4;  // both turns; tangent to the lane centrelines
  int arc_segments = 16;

  double half_box() const { return lane_width; }
  bool in_box(Vec2 p) const { return std::abs(p.x) <= half_box() && std::abs(p.y) <= half_box(); }
};

struct VehicleShape {
  double length = 4.7;
  double width = 1.7;
};

inline Vec2 rotate90(Vec2 p, int k) {
  k = ((k % 4) + 4) % 4;
  for (int i = 0; i < k; ++i) p = {-p.y, p.x};
  return p;
}

// Arc-length parameterised polyline.
struct Path {
  Arm origin = Arm::South;
  Maneuver maneuver = Maneuver::Straight;
  std::vector<Vec2> pts;
  std::vector<double> s;  // cumulative length at each point
  double entry_s = std::numeric_limits<double>::infinity();

  double length() const { return s.back(); }

  std::size_t segment(double at) const {
    auto it = std::upper_bound(s.begin(), s.end(), at);
    std::size_t k = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
    return std::min(k, pts.size() - 2);
  }
  Vec2 at(double progress) const {
    progress = std::clamp(progress, 0.0, length());
    std::size_t k = segment(progress);
    double f = (progress - s[k]) / (s[k + 1] - s[k]);
    return pts[k] + (pts[k + 1] - pts[k]) * f;
  }
  double heading(double progress) const {
    std::size_t k = segment(std::clamp(progress, 0.0, length()));
    Vec2 d = pts[k + 1] - pts[k];
    return std::atan2(d.y, d.x);
  }
};

namespace detail {

inline void finish_path(Path& p, const IntersectionMap& map) {
  p.s.assign(1, 0.0);
  for (std::size_t k = 1; k < p.pts.size(); ++k) p.s.push_back(p.s.back() + (p.pts[k] - p.pts[k - 1]).norm());
  // first progress at which the reference point is inside the box
  const double h = map.half_box();
  for (std::size_t k = 0; k + 1 < p.pts.size(); ++k) {
    Vec2 a = p.pts[k], d = p.pts[k + 1] - a;
    double lo = 0.0, hi = 1.0;
    bool ok = true;
    for (int axis = 0; axis < 2 && ok; ++axis) {
      double a0 = axis == 0 ? a.x : a.y, dd = axis == 0 ? d.x : d.y;
      if (std::abs(dd) < 1e-15) {
        if (std::abs(a0) > h) ok = false;
      } else {
        double t1 = (-h - a0) / dd, t2 = (h - a0) / dd;
        lo = std::max(lo, std::min(t1, t2));
        hi = std::min(hi, std::max(t1, t2));
      }
    }
    if (ok && lo <= hi) {
      p.entry_s = p.s[k] + lo * (p.s[k + 1] - p.s[k]);
      break;
    }
  }
}

}  // namespace detail

inline Path build_path(Arm arm, Maneuver maneuver, const IntersectionMap& map = {}) {
  const double w = map.lane_width, c = w / 2, far = map.lane_length + map.half_box(), r = map.turn_radius;
  std::vector<Vec2> pts;
  auto arc = [&](Vec2 centre, double a0, double a1) {
    for (int k = 1; k < map.arc_segments; ++k) {
      double a = a0 + (a1 - a0) * k / map.arc_segments;
      pts.push_back({centre.x + r * std::cos(a), centre.y + r * std::sin(a)});
    }
  };
  const double pi = std::numbers::pi;
  pts.push_back({c, -far});
  switch (maneuver) {
    case Maneuver::Straight:
      pts.push_back({c, far});
      break;
    case Maneuver::Right: {  // exit east, heading east on y = -c
      Vec2 centre{c + r, -c - r};
      pts.push_back({c, -c - r});
      arc(centre, pi, pi / 2);
      pts.push_back({c + r, -c});
      pts.push_back({far, -c});
      break;
    }
    case Maneuver::Left: {  // exit west, heading west on y = +c
      Vec2 centre{c - r, c - r};
      pts.push_back({c, c - r});
      arc(centre, 0.0, pi / 2);
      pts.push_back({c - r, c});
      pts.push_back({-far, c});
      break;
    }
  }
  Path p;
  p.origin = arm;
  p.maneuver = maneuver;
  for (auto& q : pts) q = rotate90(q, static_cast<int>(arm));
  p.pts = std::move(pts);
  detail::finish_path(p, map);
  return p;
}

enum class Region { Negotiation, Execution };

struct AgentState {
  double progress = 0.0;
  Vec2 pos;
  double heading = 0.0;
  double speed = 0.0;
  double time = 0.0;
  Region region = Region::Negotiation;
  bool arrived = false;
};

inline AgentState initial_state(const Path& p, double speed = 0.0) {
  AgentState s;
  s.pos = p.at(0.0);
  s.heading = p.heading(0.0);
  s.speed = speed;
  s.region = p.entry_s <= 0.0 ? Region::Execution : Region::Negotiation;
  return s;
}

inline AgentState step(const AgentState& st, const Path& path, double speed, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("step: dt must be positive");
  if (speed < 0) throw std::invalid_argument("step: negative speed");
  AgentState r = st;
  r.time += dt;
  if (st.arrived) {
    r.speed = 0.0;
    return r;
  }
  r.speed = speed;
  r.progress = st.progress + speed * dt;
  if (r.progress >= path.length()) {
    r.progress = path.length();
    r.arrived = true;
  }
  r.pos = path.at(r.progress);
  r.heading = path.heading(r.progress);
  if (r.progress >= path.entry_s) r.region = Region::Execution;
  return r;
}

// Constant-speed motion along a path from a given progress: exact
// breakpoints (waypoint passages and arrival) up to the horizon.
struct TimedPath {
  std::vector<double> t;
  std::vector<Vec2> p;
  double arrival = std::numeric_limits<double>::infinity();

  Vec2 at(double tq) const {
    if (tq <= t.front()) return p.front();
    if (tq >= t.back()) return p.back();
    auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
    double f = (tq - t[k]) / (t[k + 1] - t[k]);
    return p[k] + (p[k + 1] - p[k]) * f;
  }
  bool active(double tq) const { return tq < arrival; }
};

inline TimedPath timed_path(const Path& path, double progress, double speed, double horizon) {
  TimedPath tp;
  tp.t.push_back(0.0);
  tp.p.push_back(path.at(progress));
  if (progress >= path.length()) {
    tp.arrival = 0.0;
    tp.t.push_back(horizon);
    tp.p.push_back(tp.p.front());
    return tp;
  }
  if (speed <= 0.0) {
    tp.t.push_back(horizon);
    tp.p.push_back(tp.p.front());
    return tp;
  }
  std::size_t k = path.segment(progress) + 1;
  for (; k < path.pts.size(); ++k) {
    double tk = (path.s[k] - progress) / speed;
    if (tk <= 0.0) continue;
    if (tk >= horizon) break;
    tp.t.push_back(tk);
    tp.p.push_back(path.pts[k]);
  }
  if (k >= path.pts.size()) tp.arrival = tp.t.back();
  if (tp.t.back() < horizon) {
    tp.t.push_back(horizon);
    tp.p.push_back(path.at(progress + speed * horizon));
  }
  return tp;
}

namespace detail {

// Closest approach of two points moving linearly over [0, T].
inline double min_linear_distance(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1) {
  Vec2 d0 = p0 - q0;
  Vec2 dv = (p1 - q1) - d0;
  double a = dv.dot(dv);
  double f = a > 0 ? std::clamp(-d0.dot(dv) / a, 0.0, 1.0) : 0.0;
  return (d0 + dv * f).norm();
}

}  // namespace detail

// Minimum centre distance over [0, horizon] while both agents are still on the map.
inline double pair_min_distance(const TimedPath& a, const TimedPath& b, double horizon) {
  std::vector<double> grid;
  grid.reserve(a.t.size() + b.t.size());
  std::merge(a.t.begin(), a.t.end(), b.t.begin(), b.t.end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double end = std::min({horizon, a.arrival, b.arrival});
  double best = std::numeric_limits<double>::infinity();
  if (end <= 0.0) return best;
  for (std::size_t k = 0; k + 1 < grid.size() && grid[k] < end; ++k) {
    double t0 = grid[k], t1 = std::min(grid[k + 1], end);
    best = std::min(best, detail::min_linear_distance(a.at(t0), a.at(t1), b.at(t0), b.at(t1)));
  }
  return best;
}

struct Rollout {
  SystemTrajectory traj;  // times relative to the start of the rollout
  std::vector<std::vector<double>> heading;
  std::vector<std::vector<bool>> on_map;  // false once arrived
  double min_pairwise_distance = std::numeric_limits<double>::infinity();
  std::vector<bool> arrived;
};

inline Rollout rollout(const std::vector<AgentState>& current, const std::vector<const Path*>& paths,
                       const std::vector<double>& speeds, double horizon, double dt) {
  const std::size_t n = current.size();
  if (paths.size() != n || speeds.size() != n) throw std::invalid_argument("rollout: one path and speed per agent");
  if (!(dt > 0) || !(horizon > 0)) throw std::invalid_argument("rollout: dt and horizon must be positive");
  std::vector<TimedPath> tps;
  double all_done = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double v = current[a].arrived ? 0.0 : speeds[a];
    tps.push_back(timed_path(*paths[a], current[a].progress, v, horizon));
    all_done = std::max(all_done, std::min(tps.back().arrival, horizon));
  }
  double end = std::max(all_done, dt);
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    double t = k * dt;
    if (t >= end - 1e-12) break;
    grid.push_back(t);
  }
  grid.push_back(end);
  for (const auto& tp : tps)
    for (double t : tp.t)
      if (t < end) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double x, double y) { return y - x < 1e-12; }), grid.end());

  Rollout r;
  r.traj.t = grid;
  r.heading.resize(n);
  r.on_map.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    r.traj.ids.push_back(std::to_string(a + 1));
    std::vector<Vec2> p;
    for (double t : grid) {
      p.push_back(tps[a].at(t));
      double prog = current[a].progress + (current[a].arrived ? 0.0 : speeds[a]) * t;
      r.heading[a].push_back(paths[a]->heading(prog));
      r.on_map[a].push_back(tps[a].active(t));
    }
    r.traj.pos.push_back(std::move(p));
    r.arrived.push_back(tps[a].arrival <= end);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      r.min_pairwise_distance = std::min(r.min_pairwise_distance, pair_min_distance(tps[a], tps[b], end));
  return r;
}

// Separating-axis test for two oriented rectangles centred at the reference points.
inline bool rectangles_overlap(Vec2 pa, double ha, Vec2 pb, double hb, const VehicleShape& shape) {
  const double hl = shape.length / 2, hw = shape.width / 2;
  std::array<Vec2, 4> axes{Vec2{std::cos(ha), std::sin(ha)}, Vec2{-std::sin(ha), std::cos(ha)},
                           Vec2{std::cos(hb), std::sin(hb)}, Vec2{-std::sin(hb), std::cos(hb)}};
  Vec2 d = pb - pa;
  for (const Vec2& ax : axes) {
    auto extent = [&](double h) {
      Vec2 u{std::cos(h), std::sin(h)}, v{-std::sin(h), std::cos(h)};
      return hl * std::abs(u.dot(ax)) + hw * std::abs(v.dot(ax));
    };
    if (std::abs(d.dot(ax)) > extent(ha) + extent(hb)) return false;
  }
  return true;
}

inline bool check_collision(const Rollout& r, const VehicleShape& shape = {}) {
  const int n = r.traj.agents();
  for (std::size_t k = 0; k < r.traj.t.size(); ++k)
    for (int a = 0; a < n; ++a) {
      if (!r.on_map[a][k]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!r.on_map[b][k]) continue;
        if (rectangles_overlap(r.traj.pos[a][k], r.heading[a][k], r.traj.pos[b][k], r.heading[b][k], shape))
          return true;
      }
    }
  return false;
}

}  // namespace braidnav
