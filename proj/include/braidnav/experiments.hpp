#pragma once

// Scenario sweeps at the symmetric intersection and their statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "complexity.hpp"
#include "parallel.hpp"
#include "planner.hpp"
#include "topology.hpp"
#include "world.hpp"

namespace braidnav {

struct AgentSpec {
  Arm origin = Arm::South;
  Maneuver maneuver = Maneuver::Straight;
  double v_high = 7.5;
};

struct ScenarioSpec {
  std::string id;
  int index = 0;
  std::vector<AgentSpec> agents;
  double dt = 0.1;
  double horizon = 120.0;
};

inline std::vector<double> linspace(double lo, double hi, int k) {
  std::vector<double> v;
  for (int i = 0; i < k; ++i) v.push_back(k == 1 ? lo : lo + (hi - lo) * i / (k - 1));
  return v;
}

inline std::vector<ScenarioSpec> generate_scenarios(const std::string& which) {
  std::vector<Arm> arms;
  int grid = 0;
  if (which == "S1") {
    arms = {Arm::South, Arm::East};
    grid = 12;
  } else if (which == "S2") {
    arms = {Arm::South, Arm::East, Arm::North};
    grid = 5;
  } else if (which == "S3") {
    arms = {Arm::South, Arm::East, Arm::North, Arm::West};
    grid = 3;
  } else {
    throw std::invalid_argument("unknown scenario '" + which + "'");
  }
  const auto speeds = linspace(5.0, 10.0, grid);
  const int n = static_cast<int>(arms.size());
  int total = 1;
  for (int i = 0; i < n; ++i) total *= grid;
  std::vector<ScenarioSpec> out;
  for (int idx = 0; idx < total; ++idx) {
    ScenarioSpec s;
    s.id = which;
    s.index = idx;
    int r = idx;
    std::vector<int> digit(n);
    for (int a = n - 1; a >= 0; --a) {  // first agent varies slowest
      digit[a] = r % grid;
      r /= grid;
    }
    for (int a = 0; a < n; ++a) s.agents.push_back({arms[a], Maneuver::Straight, speeds[digit[a]]});
    out.push_back(std::move(s));
  }
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t experiment_seed(std::uint64_t master, const std::string& scenario, const std::string& condition,
                                     int index) {
  std::uint64_t h = splitmix64(master);
  for (char ch : scenario + "/" + condition) h = splitmix64(h ^ static_cast<unsigned char>(ch));
  return splitmix64(h ^ static_cast<std::uint64_t>(index));
}

struct RunOptions {
  Condition condition = Condition::C2;
  bool inattentive_first = false;  // primed conditions
  std::uint64_t seed = 0;
  PlannerConfig planner;
  IntersectionMap map;
  VehicleShape shape;
  bool record_support = false;
};

struct ExperimentResult {
  bool collided = false;
  bool timeout = false;
  double max_time = 0.0;
  std::vector<double> arrival;
  std::vector<std::vector<double>> entropy;  // per agent, per step (NaN when not planning)
  std::vector<std::vector<double>> command;  // per agent, per step
  BraidWord executed_braid;
  bool braid_ok = true;
  std::vector<double> p_high;
  std::set<std::string> support;  // braid keys seen in any belief (record_support)
};

inline std::string condition_tag(Condition c, bool primed) { return to_string(c) + (primed ? "'" : ""); }

inline ExperimentResult run_experiment(const ScenarioSpec& spec, const RunOptions& opt) {
  const int n = static_cast<int>(spec.agents.size());
  if (n < 1) throw std::invalid_argument("run_experiment: no agents");
  if (!(spec.dt > 0)) throw std::invalid_argument("run_experiment: dt must be positive");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> pref(0.6, 0.8);

  std::vector<std::array<Path, 3>> paths(n);
  std::vector<AgentView> views(n);
  ExperimentResult res;
  for (int a = 0; a < n; ++a) {
    const AgentSpec& as = spec.agents[a];
    if (!(as.v_high > 0)) throw std::invalid_argument("run_experiment: speeds must be positive");
    for (int m = 0; m < 3; ++m) paths[a][m] = build_path(as.origin, kManeuvers[m], opt.map);
    views[a].origin = as.origin;
    views[a].intended = as.maneuver;
    views[a].speeds = {opt.planner.v_low_ratio * as.v_high, as.v_high, pref(rng)};
    views[a].state = initial_state(paths[a][static_cast<int>(as.maneuver)], as.v_high);
    res.p_high.push_back(views[a].speeds.p_high);
  }
  auto own_path = [&](int a) -> const Path& { return paths[a][static_cast<int>(spec.agents[a].maneuver)]; };

  res.arrival.assign(n, std::numeric_limits<double>::quiet_NaN());
  res.entropy.assign(n, {});
  res.command.assign(n, {});
  std::vector<Trajectory> hist(n);
  auto record = [&](double t) {
    for (int a = 0; a < n; ++a) hist[a].samples.push_back({t, views[a].state.pos.x, views[a].state.pos.y});
  };
  auto collide_now = [&] {
    for (int a = 0; a < n; ++a) {
      if (views[a].state.arrived) continue;
      for (int b = a + 1; b < n; ++b) {
        if (views[b].state.arrived) continue;
        if (rectangles_overlap(views[a].state.pos, views[a].state.heading, views[b].state.pos,
                               views[b].state.heading, opt.shape))
          return true;
      }
    }
    return false;
  };

  double t = 0.0;
  record(t);
  res.collided = collide_now();
  bool planning = opt.condition != Condition::C1;
  int steps = 0;
  while (true) {
    bool all = true;
    for (const auto& v : views) all &= v.state.arrived;
    if (all) break;
    if (t >= spec.horizon - 1e-9) {
      res.timeout = true;
      break;
    }
    std::vector<double> cmd(n, 0.0);
    std::optional<Planner> planner;
    if (planning && n >= 2) planner.emplace(views, &paths, opt.planner);
    for (int a = 0; a < n; ++a) {
      double h = std::numeric_limits<double>::quiet_NaN();
      if (views[a].state.arrived) {
        cmd[a] = 0.0;
      } else if (!planner || (opt.inattentive_first && a == 0)) {
        cmd[a] = inattentive_policy(views[a]);
      } else {
        bool tl = false, th = false;
        double hl = planner->belief_entropy(a, opt.condition, false, &tl);
        double hh = planner->belief_entropy(a, opt.condition, true, &th);
        if (tl) hl = std::numeric_limits<double>::infinity();
        if (th) hh = std::numeric_limits<double>::infinity();
        bool low = hl < hh;
        cmd[a] = low ? views[a].speeds.v_low : views[a].speeds.v_high;
        h = low ? hl : hh;
        if (opt.record_support && uses_braids(opt.condition))
          for (bool hi : {false, true})
            for (const auto& [k, m] : planner->compute_belief(a, opt.condition, hi).mass)
              if (m > 0) res.support.insert(k);
      }
      res.entropy[a].push_back(h);
      res.command[a].push_back(cmd[a]);
    }
    for (int a = 0; a < n; ++a) {
      if (views[a].state.arrived) continue;
      const Path& p = own_path(a);
      double before = views[a].state.progress;
      views[a].state = step(views[a].state, p, cmd[a], spec.dt);
      if (views[a].state.arrived && cmd[a] > 0) res.arrival[a] = t + (p.length() - before) / cmd[a];
    }
    ++steps;
    t = steps * spec.dt;
    record(t);
    if (!res.collided) res.collided = collide_now();
  }
  res.max_time = 0.0;
  for (int a = 0; a < n; ++a) {
    if (std::isnan(res.arrival[a])) res.arrival[a] = views[a].state.arrived ? 0.0 : spec.horizon;
    res.max_time = std::max(res.max_time, res.arrival[a]);
  }
  if (res.timeout) res.max_time = spec.horizon;
  for (int a = 0; a < n; ++a) hist[a].agent_id = std::to_string(a + 1);
  try {
    if (n >= 2) {
      res.executed_braid = free_reduce(extract_braid(make_system(hist), opt.planner.frame).first);
    } else {
      res.executed_braid = identity(n);
    }
  } catch (const std::exception&) {
    res.braid_ok = false;
    res.executed_braid = identity(n);
  }
  return res;
}

struct BatchRow {
  std::string scenario;
  std::string condition;
  int index = 0;
  ExperimentResult result;
};

inline std::vector<BatchRow> run_batch(const std::string& scenario, Condition c, bool primed, std::uint64_t master,
                                       int jobs, const PlannerConfig& planner = {}) {
  auto specs = generate_scenarios(scenario);
  std::vector<BatchRow> rows(specs.size());
  const std::string tag = condition_tag(c, primed);
  parallel_for(static_cast<int>(specs.size()), jobs, [&](int i) {
    RunOptions opt;
    opt.condition = c;
    opt.inattentive_first = primed;
    opt.planner = planner;
    opt.seed = experiment_seed(master, scenario, tag, i);
    rows[i] = {scenario, tag, i, run_experiment(specs[i], opt)};
  });
  return rows;
}

struct Summary {
  int runs = 0;
  double collision_rate = 0.0;
  double collision_sd = 0.0;
  double time_median = 0.0;
  double time_q25 = 0.0;
  double time_q75 = 0.0;
};

// Linear-interpolation percentile on sorted data (q in [0, 1]).
inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile of empty data");
  std::sort(v.begin(), v.end());
  double pos = q * (v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

inline Summary aggregate(const std::vector<bool>& collided, const std::vector<double>& max_time) {
  if (collided.empty() || collided.size() != max_time.size())
    throw std::invalid_argument("aggregate: need >= 1 result");
  Summary s;
  s.runs = static_cast<int>(collided.size());
  s.collision_rate = static_cast<double>(std::count(collided.begin(), collided.end(), true)) / s.runs;
  s.collision_sd = std::sqrt(s.collision_rate * (1.0 - s.collision_rate) / s.runs);
  s.time_median = percentile(max_time, 0.5);
  s.time_q25 = percentile(max_time, 0.25);
  s.time_q75 = percentile(max_time, 0.75);
  return s;
}

inline Summary aggregate(const std::vector<BatchRow>& rows) {
  std::vector<bool> c;
  std::vector<double> t;
  for (const auto& r : rows) {
    c.push_back(r.result.collided);
    t.push_back(r.result.max_time);
  }
  return aggregate(c, t);
}

// |T|^n (|U|^n)^H
inline BigInt cartesian_trajectory_count(unsigned nT, unsigned nU, unsigned n, unsigned H) {
  if (nT < 1 || nU < 1 || n < 1 || H < 1) throw std::invalid_argument("counts must be >= 1");
  return boost::multiprecision::pow(BigInt(nT), n) * boost::multiprecision::pow(BigInt(nU), n * H);
}

// 3^(n choose 2)
inline BigInt braid_outcome_bound(unsigned n) {
  if (n < 2) throw std::invalid_argument("braid_outcome_bound: n must be >= 2");
  return boost::multiprecision::pow(BigInt(3), n * (n - 1) / 2);
}

}  // namespace braidnav
