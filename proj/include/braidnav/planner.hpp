#pragma once

// Entropy-minimising speed selection over beliefs on future braids.
//
// Each step, every agent looks at the same snapshot of the world. For each
// hypothesis (path, speed) of every agent a constant-speed rollout is
// implied; pairwise crossing events and closest approaches are computed
// once per snapshot and combined per joint hypothesis, which is equivalent
// to extracting the braid from the joint rollout.

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "topology.hpp"
#include "world.hpp"

namespace braidnav {

struct SpeedModel {
  double v_low = 3.0;
  double v_high = 7.5;
  double p_high = 0.7;
};

struct CollisionModel {
  double a = 2.0;      // 1/m
  double delta = 3.0;  // m
};

enum class Condition { C1, C2, C3, C4, C5 };

inline std::string to_string(Condition c) { return "C" + std::to_string(static_cast<int>(c) + 1); }

inline Condition parse_condition(const std::string& s) {
  if (s.size() == 2 && s[0] == 'C' && s[1] >= '1' && s[1] <= '5') return static_cast<Condition>(s[1] - '1');
  throw std::invalid_argument("unknown condition '" + s + "'");
}

inline bool uses_braids(Condition c) { return c == Condition::C2 || c == Condition::C3; }
inline bool knows_paths(Condition c) { return c == Condition::C3 || c == Condition::C5; }

struct PlannerConfig {
  CollisionModel collision;
  double v_low_ratio = 0.4;
  double horizon_cap = 60.0;
  double mass_floor = 1e-12;
  ProjectionFrame frame;
};

// What every agent can see of agent j. The intended maneuver is only used
// where the model allows it (own path, execution region, or C3/C5).
struct AgentView {
  Arm origin = Arm::South;
  Maneuver intended = Maneuver::Straight;
  AgentState state;
  SpeedModel speeds;
};

struct OutcomeBelief {
  std::map<std::string, double> mass;
  bool terminal = false;

  double total() const {
    double s = 0;
    for (const auto& [k, m] : mass) s += m;
    return s;
  }
};

inline std::array<double, 3> intent_posterior(const AgentView& v, bool is_ego) {
  std::array<double, 3> p{};
  if (is_ego || v.state.region == Region::Execution) {
    p[static_cast<int>(v.intended)] = 1.0;
  } else {
    p.fill(1.0 / 3.0);
  }
  return p;
}

inline double control_prior(double p_high, const std::vector<bool>& high) {
  double p = 1.0;
  for (bool h : high) p *= h ? p_high : 1.0 - p_high;
  return p;
}

inline double collision_probability(double d_min, const CollisionModel& m) {
  if (std::isinf(d_min)) return 0.0;
  return 1.0 / (1.0 + std::exp(m.a * (d_min - m.delta)));
}

// Shannon entropy in bits of the renormalised belief; 0 for an empty one.
inline double entropy(const std::vector<double>& masses) {
  double tot = 0;
  for (double m : masses) tot += m;
  if (!(tot > 0)) return 0.0;
  double h = 0;
  for (double m : masses)
    if (m > 0) {
      double p = m / tot;
      h -= p * std::log2(p);
    }
  return h;
}

inline double entropy(const OutcomeBelief& b) {
  std::vector<double> m;
  for (const auto& [k, v] : b.mass) m.push_back(v);
  return entropy(m);
}

inline double inattentive_policy(const AgentView& v) { return v.state.arrived ? 0.0 : v.speeds.v_high; }

class Planner {
 public:
  Planner(std::vector<AgentView> agents, const std::vector<std::array<Path, 3>>* paths, PlannerConfig cfg = {})
      : agents_(std::move(agents)), paths_(paths), cfg_(cfg) {
    if (paths_->size() != agents_.size()) throw std::invalid_argument("planner: one path set per agent");
    build();
  }

  int agents() const { return static_cast<int>(agents_.size()); }
  double horizon() const { return horizon_; }

  // Belief of ego under a condition; ego_high fixes ego's own control.
  OutcomeBelief compute_belief(int ego, Condition c, std::optional<bool> ego_high = std::nullopt,
                               bool collision_filter = true) {
    OutcomeBelief out;
    std::unordered_map<long, double> acc;
    double total = accumulate(ego, c, ego_high, collision_filter, acc);
    for (const auto& [key, m] : acc) out.mass[key_text(c, key)] += m;
    out.terminal = !(total > cfg_.mass_floor);
    return out;
  }

  double belief_entropy(int ego, Condition c, std::optional<bool> ego_high, bool* terminal = nullptr) {
    std::unordered_map<long, double> acc;
    double total = accumulate(ego, c, ego_high, true, acc);
    if (terminal) *terminal = !(total > cfg_.mass_floor);
    std::vector<double> m;
    m.reserve(acc.size());
    for (const auto& [k, v] : acc) m.push_back(v);
    return entropy(m);
  }

  // Commanded speed for ego. Ties and the C1 condition go to the high speed.
  double select_action(int ego, Condition c) {
    const AgentView& me = agents_[ego];
    if (me.state.arrived) return 0.0;
    if (c == Condition::C1) return me.speeds.v_high;
    bool term_lo = false, term_hi = false;
    double h_lo = belief_entropy(ego, c, false, &term_lo);
    double h_hi = belief_entropy(ego, c, true, &term_hi);
    if (term_lo) h_lo = std::numeric_limits<double>::infinity();
    if (term_hi) h_hi = std::numeric_limits<double>::infinity();
    return h_lo < h_hi ? me.speeds.v_low : me.speeds.v_high;
  }

  // Reduced braid of one joint hypothesis; maneuver and speed flags per agent.
  BraidWord hypothesis_braid(const std::vector<Maneuver>& m, const std::vector<bool>& high) {
    long idx = 0;
    for (int j = agents() - 1; j >= 0; --j) idx = idx * radix_[j] + local_index(j, m[j], high[j]);
    return braids_[braid_id(idx)];
  }
  double hypothesis_min_distance(const std::vector<Maneuver>& m, const std::vector<bool>& high) {
    std::vector<int> h(agents());
    for (int j = 0; j < agents(); ++j) h[j] = local_index(j, m[j], high[j]);
    return joint_min_distance(h);
  }

 private:
  struct Hyp {
    int maneuver = 1;
    bool high = true;
  };
  struct PairData {
    std::vector<PairCrossing> events;
    double dmin = std::numeric_limits<double>::infinity();
  };

  std::vector<AgentView> agents_;
  const std::vector<std::array<Path, 3>>* paths_;
  PlannerConfig cfg_;
  double horizon_ = 0.0;
  std::vector<std::vector<Hyp>> hyps_;
  std::vector<int> radix_;
  std::vector<std::vector<double>> start_eta_;  // per agent and hypothesis
  std::vector<std::vector<std::vector<PairData>>> pair_;  // pair_[j*n+k][hj][hk], j < k
  std::unordered_map<long, int> braid_of_;
  std::map<std::vector<int>, int> braid_ids_;
  std::vector<BraidWord> braids_;

  int local_index(int j, Maneuver m, bool high) const {
    for (std::size_t h = 0; h < hyps_[j].size(); ++h)
      if (hyps_[j][h].maneuver == static_cast<int>(m) && (agents_[j].state.arrived || hyps_[j][h].high == high))
        return static_cast<int>(h);
    throw std::invalid_argument("planner: hypothesis not available");
  }

  void build() {
    const int n = agents();
    horizon_ = 0.0;
    for (int j = 0; j < n; ++j) {
      const AgentView& v = agents_[j];
      if (v.state.arrived) continue;
      if (!(v.speeds.v_low > 0) || !(v.speeds.v_high > v.speeds.v_low))
        throw std::invalid_argument("planner: need 0 < v_low < v_high");
      double longest = 0;
      for (const Path& p : (*paths_)[j]) longest = std::max(longest, p.length() - v.state.progress);
      horizon_ = std::max(horizon_, longest / v.speeds.v_low);
    }
    horizon_ = std::min(std::max(horizon_, 1e-3), cfg_.horizon_cap);

    hyps_.assign(n, {});
    radix_.assign(n, 1);
    std::vector<std::vector<TimedPath>> tps(n);
    for (int j = 0; j < n; ++j) {
      const AgentView& v = agents_[j];
      for (int m = 0; m < 3; ++m) {
        // paths of agents in the execution region are common knowledge
        if (v.state.region == Region::Execution && m != static_cast<int>(v.intended)) continue;
        const Path& p = (*paths_)[j][m];
        if (v.state.arrived) {
          hyps_[j].push_back({m, true});
          tps[j].push_back(timed_path(p, v.state.progress, 0.0, horizon_));
          continue;
        }
        for (bool high : {false, true}) {
          hyps_[j].push_back({m, high});
          tps[j].push_back(timed_path(p, v.state.progress, high ? v.speeds.v_high : v.speeds.v_low, horizon_));
        }
      }
      radix_[j] = static_cast<int>(hyps_[j].size());
    }

    start_eta_.assign(n, {});
    for (int j = 0; j < n; ++j)
      for (const TimedPath& tp : tps[j]) start_eta_[j].push_back(tp.p.front().dot(cfg_.frame.eta));

    const Vec2 eta = cfg_.frame.eta, nu = cfg_.frame.nu;
    pair_.assign(n * n, {});
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        auto& tab = pair_[j * n + k];
        tab.assign(hyps_[j].size(), std::vector<PairData>(hyps_[k].size()));
        for (std::size_t a = 0; a < hyps_[j].size(); ++a)
          for (std::size_t b = 0; b < hyps_[k].size(); ++b) {
            const TimedPath &A = tps[j][a], &B = tps[k][b];
            std::vector<double> grid;
            grid.reserve(A.t.size() + B.t.size());
            std::merge(A.t.begin(), A.t.end(), B.t.begin(), B.t.end(), std::back_inserter(grid));
            grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
            std::vector<Vec2> pa, pb;
            pa.reserve(grid.size());
            pb.reserve(grid.size());
            for (double t : grid) {
              pa.push_back(A.at(t));
              pb.push_back(B.at(t));
            }
            PairData& pd = tab[a][b];
            pair_crossings(
                grid, [&](std::size_t q) { return pa[q].dot(eta); }, [&](std::size_t q) { return pb[q].dot(eta); },
                [&](std::size_t q) { return pa[q].dot(nu); }, [&](std::size_t q) { return pb[q].dot(nu); }, j, k,
                pd.events);
            pd.dmin = pair_min_distance(A, B, horizon_);
          }
      }
  }

  double joint_min_distance(const std::vector<int>& h) const {
    const int n = agents();
    double d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) d = std::min(d, pair_[j * n + k][h[j]][h[k]].dmin);
    return d;
  }

  int braid_id(long idx) {
    auto it = braid_of_.find(idx);
    if (it != braid_of_.end()) return it->second;
    const int n = agents();
    std::vector<int> h(n);
    long r = idx;
    for (int j = 0; j < n; ++j) {
      h[j] = static_cast<int>(r % radix_[j]);
      r /= radix_[j];
    }
    std::vector<double> e0(n);
    for (int j = 0; j < n; ++j) e0[j] = start_eta_[j][h[j]];
    std::vector<PairCrossing> ev;
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const auto& e = pair_[j * n + k][h[j]][h[k]].events;
        ev.insert(ev.end(), e.begin(), e.end());
      }
    std::vector<int> key;
    try {
      key = free_reduce(assemble_braid(detail::rank_order(e0), std::move(ev), nullptr, false).first.letters);
    } catch (const ExtractionError&) {
      key = {0};  // strands meet: no braid, kept as its own outcome
    }
    auto [pos, fresh] = braid_ids_.emplace(key, static_cast<int>(braids_.size()));
    if (fresh) braids_.push_back(BraidWord{n, key});
    braid_of_.emplace(idx, pos->second);
    return pos->second;
  }

  std::string key_text(Condition c, long key) const {
    if (uses_braids(c)) {
      const BraidWord& w = braids_[key];
      if (w.letters.size() == 1 && w.letters[0] == 0) return "n=" + std::to_string(w.n) + ": meet";
      return to_string(w);
    }
    std::string s = "T=";
    std::string u = "U=";
    long r = key;
    for (int j = 0; j < agents(); ++j) {
      const Hyp& hp = hyps_[j][r % radix_[j]];
      r /= radix_[j];
      if (j) {
        s += ",";
        u += ",";
      }
      s += to_string(static_cast<Maneuver>(hp.maneuver));
      u += agents_[j].state.arrived ? "-" : (hp.high ? "high" : "low");
    }
    return s + "|" + u;
  }

  // Adds masses per outcome key, returns the total.
  double accumulate(int ego, Condition c, std::optional<bool> ego_high, bool collision_filter,
                    std::unordered_map<long, double>& acc) {
    const int n = agents();
    if (ego < 0 || ego >= n) throw std::out_of_range("planner: bad ego index");
    const double p_high = agents_[ego].speeds.p_high;
    // allowed hypotheses and their prior weight, per agent
    std::vector<std::vector<std::pair<int, double>>> allowed(n);
    bool any_moving = false;
    for (int j = 0; j < n; ++j) {
      const AgentView& v = agents_[j];
      any_moving |= !v.state.arrived;
      bool known = j == ego || knows_paths(c) || v.state.region == Region::Execution;
      for (std::size_t h = 0; h < hyps_[j].size(); ++h) {
        const Hyp& hp = hyps_[j][h];
        if (known && hp.maneuver != static_cast<int>(v.intended)) continue;
        double w = 1.0;
        if (!known && !knows_paths(c)) w *= 1.0 / 3.0;  // P(T | history)
        if (!v.state.arrived) {
          if (j == ego && ego_high) {
            if (hp.high != *ego_high) continue;
          } else {
            w *= hp.high ? p_high : 1.0 - p_high;
          }
        }
        allowed[j].push_back({static_cast<int>(h), w});
      }
    }
    if (!any_moving || n < 2) return 0.0;
    std::vector<int> pick(n, 0), h(n);
    double total = 0.0;
    for (;;) {
      double w = 1.0;
      long idx = 0;
      for (int j = n - 1; j >= 0; --j) {
        h[j] = allowed[j][pick[j]].first;
        w *= allowed[j][pick[j]].second;
        idx = idx * radix_[j] + h[j];
      }
      if (collision_filter) w *= 1.0 - collision_probability(joint_min_distance(h), cfg_.collision);
      long key = uses_braids(c) ? braid_id(idx) : idx;
      acc[key] += w;
      total += w;
      int j = 0;
      for (; j < n; ++j) {
        if (++pick[j] < static_cast<int>(allowed[j].size())) break;
        pick[j] = 0;
      }
      if (j == n) break;
    }
    return total;
  }
};

}  // namespace braidnav
