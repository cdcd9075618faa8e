#pragma once

// Recorded-traffic pipeline: CSV ingestion, episode slicing, braid
// clustering and TC statistics.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "braid.hpp"
#include "complexity.hpp"
#include "parallel.hpp"
#include "topology.hpp"
#include "world.hpp"

namespace braidnav {

struct EpisodeConfig {
  double episode_duration = 10.0;            // s
  double min_pairwise_distance_filter = 10.0;  // m
  double stationary_speed_threshold = 0.25;  // m/s, mean speed
  bool sliding = false;
  double stride = 1.0;  // s, only with sliding
};

inline void check_config(const EpisodeConfig& c) {
  if (!(c.episode_duration > 0) || !(c.min_pairwise_distance_filter > 0) || !(c.stationary_speed_threshold > 0) ||
      !(c.stride > 0))
    throw std::invalid_argument("episode config values must be positive");
}

struct IngestResult {
  std::vector<Trajectory> trajectories;  // ordered by agent id
  std::vector<std::string> diagnostics;
  int rejected_rows = 0;
  std::vector<std::string> rejected_agents;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  f.push_back(cur);
  for (auto& s : f) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }
  return f;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

// Rows `agent_id,frame,t,x,y` or `agent_id,t,x,y` under a header line.
// Rows may come in any order; each agent is sorted by frame (if present)
// and then by t. An agent whose time does not increase along its frames is
// rejected as a whole.
inline IngestResult ingest(std::istream& in) {
  IngestResult res;
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = detail::split_csv(line);
    break;
  }
  if (header.empty()) return res;
  int c_id = -1, c_frame = -1, c_t = -1, c_x = -1, c_y = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const auto& h = header[i];
    if (h == "agent_id") c_id = i;
    else if (h == "frame") c_frame = i;
    else if (h == "t") c_t = i;
    else if (h == "x") c_x = i;
    else if (h == "y") c_y = i;
  }
  if (c_id < 0 || c_t < 0 || c_x < 0 || c_y < 0)
    throw std::invalid_argument("line " + std::to_string(lineno) + ": header must name agent_id,t,x,y");

  struct Row {
    double frame, t, x, y;
    int line;
  };
  std::map<std::string, std::vector<Row>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = detail::split_csv(line);
    auto bad = [&](const std::string& why) {
      res.diagnostics.push_back("line " + std::to_string(lineno) + ": " + why);
      ++res.rejected_rows;
    };
    if (f.size() != header.size()) {
      bad("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
      continue;
    }
    Row r{0, 0, 0, 0, lineno};
    if (f[c_id].empty()) {
      bad("empty agent_id");
      continue;
    }
    if (!detail::parse_double(f[c_t], r.t) || !detail::parse_double(f[c_x], r.x) ||
        !detail::parse_double(f[c_y], r.y) || (c_frame >= 0 && !detail::parse_double(f[c_frame], r.frame))) {
      bad("malformed number");
      continue;
    }
    rows[f[c_id]].push_back(r);
  }
  for (auto& [id, rs] : rows) {
    std::stable_sort(rs.begin(), rs.end(), [&](const Row& a, const Row& b) {
      return c_frame >= 0 ? a.frame < b.frame : a.t < b.t;
    });
    Trajectory tr{id, {}};
    bool ok = true;
    for (std::size_t k = 0; k < rs.size(); ++k) {
      if (k > 0 && rs[k].t == rs[k - 1].t) {
        res.diagnostics.push_back("line " + std::to_string(rs[k].line) + ": duplicate row for agent " + id +
                                  " at t=" + std::to_string(rs[k].t));
        ++res.rejected_rows;
        continue;
      }
      if (!tr.samples.empty() && rs[k].t < tr.samples.back().t) {
        res.diagnostics.push_back("line " + std::to_string(rs[k].line) + ": agent " + id +
                                  " has non-monotone timestamps");
        ok = false;
        break;
      }
      tr.samples.push_back({rs[k].t, rs[k].x, rs[k].y});
    }
    if (ok) {
      res.trajectories.push_back(std::move(tr));
    } else {
      res.rejected_agents.push_back(id);
    }
  }
  return res;
}

inline IngestResult ingest(const std::string& text) {
  std::istringstream in(text);
  return ingest(in);
}

namespace detail {

// Part of tr on [t0, t1], with interpolated endpoints.
inline Trajectory clip(const Trajectory& tr, double t0, double t1) {
  Trajectory out{tr.agent_id, {}};
  Vec2 a = interpolate(tr, t0), b = interpolate(tr, t1);
  out.samples.push_back({t0, a.x, a.y});
  for (const auto& s : tr.samples)
    if (s.t > t0 && s.t < t1) out.samples.push_back(s);
  out.samples.push_back({t1, b.x, b.y});
  return out;
}

inline double path_length(const Trajectory& tr) {
  double l = 0;
  for (std::size_t k = 1; k < tr.samples.size(); ++k)
    l += std::hypot(tr.samples[k].x - tr.samples[k - 1].x, tr.samples[k].y - tr.samples[k - 1].y);
  return l;
}

inline double min_distance(const SystemTrajectory& xs, int a, int b) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < xs.t.size(); ++k)
    d = std::min(d, min_linear_distance(xs.pos[a][k], xs.pos[a][k + 1], xs.pos[b][k], xs.pos[b][k + 1]));
  return d;
}

}  // namespace detail

inline std::vector<SystemTrajectory> slice_episodes(const std::vector<Trajectory>& trs, const EpisodeConfig& cfg) {
  check_config(cfg);
  std::vector<SystemTrajectory> out;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& tr : trs) {
    if (tr.samples.size() < 2) continue;
    lo = std::min(lo, tr.samples.front().t);
    hi = std::max(hi, tr.samples.back().t);
  }
  if (!(hi > lo)) return out;
  const double D = cfg.episode_duration;
  const double step = cfg.sliding ? cfg.stride : D;
  // A recording of N frames spans (N - 1) frame periods but covers N, so
  // windows may end up to one frame period past the last sample (at most a
  // tenth of a window, for coarse data).
  std::vector<double> dts;
  for (const auto& tr : trs)
    for (std::size_t k = 1; k < tr.samples.size(); ++k) dts.push_back(tr.samples[k].t - tr.samples[k - 1].t);
  std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
  const double eps = std::min(dts[dts.size() / 2] * (1 + 1e-6), 0.1 * D);
  for (int w = 0;; ++w) {
    double t0 = lo + w * step, t1 = t0 + D;
    if (t1 > hi + eps) break;
    t1 = std::min(t1, hi);
    std::vector<Trajectory> kept;
    for (const auto& tr : trs) {
      if (tr.samples.size() < 2) continue;
      if (tr.samples.front().t > t0 + 1e-9 || tr.samples.back().t < t1 - 1e-9) continue;
      Trajectory c = detail::clip(tr, t0, t1);
      if (detail::path_length(c) / (t1 - t0) < cfg.stationary_speed_threshold) continue;
      kept.push_back(std::move(c));
    }
    // drop isolated agents until every survivor has a close neighbour
    while (kept.size() >= 2) {
      SystemTrajectory xs = make_system(kept);
      std::vector<Trajectory> next;
      for (int a = 0; a < xs.agents(); ++a) {
        bool near = false;
        for (int b = 0; b < xs.agents() && !near; ++b)
          near = b != a && detail::min_distance(xs, a, b) <= cfg.min_pairwise_distance_filter;
        if (near) next.push_back(kept[a]);
      }
      if (next.size() == kept.size()) break;
      kept = std::move(next);
    }
    if (kept.size() < 2) continue;
    out.push_back(make_system(kept));
  }
  return out;
}

struct BraidCluster {
  std::string key;  // simplified word, text form
  double tc = 0.0;
  int count = 0;
  double frequency = 0.0;
};

struct SceneReport {
  int episodes = 0;
  int skipped = 0;
  std::vector<std::string> diagnostics;
  double agents_mean = 0.0;
  double agents_sd = 0.0;
  int unique_braids = 0;
  double tc_mean = 0.0;
  double tc_sd = 0.0;
  std::vector<std::pair<double, double>> cdf;  // (tc, fraction of episodes with TC <= tc)
  std::vector<BraidCluster> braids;            // ordered by increasing TC
  std::vector<double> tc;                      // per analysed episode, input order
};

struct EpisodeBraid {
  bool ok = false;
  std::string error;
  BraidWord word;
  double tc = 0.0;
};

inline EpisodeBraid analyze_episode(const SystemTrajectory& xs, const ProjectionFrame& frame) {
  EpisodeBraid r;
  try {
    r.word = relation_simplify(extract_braid(xs, frame).first);
    r.tc = topological_complexity(r.word).tc;
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

namespace detail {
inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / v.size())};
}
}  // namespace detail

inline SceneReport analyze_scene(const std::vector<SystemTrajectory>& episodes, const ProjectionFrame& frame = {},
                                 int jobs = 1) {
  std::vector<EpisodeBraid> res(episodes.size());
  parallel_for(static_cast<int>(episodes.size()), jobs, [&](int i) { res[i] = analyze_episode(episodes[i], frame); });

  SceneReport rep;
  std::vector<double> agents;
  std::map<std::string, BraidCluster> clusters;
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (!res[i].ok) {
      ++rep.skipped;
      rep.diagnostics.push_back("episode " + std::to_string(i) + ": " + res[i].error);
      continue;
    }
    ++rep.episodes;
    agents.push_back(episodes[i].agents());
    rep.tc.push_back(res[i].tc);
    auto key = to_string(res[i].word);
    auto& c = clusters[key];
    c.key = key;
    c.tc = res[i].tc;
    ++c.count;
  }
  std::tie(rep.agents_mean, rep.agents_sd) = detail::mean_sd(agents);
  std::tie(rep.tc_mean, rep.tc_sd) = detail::mean_sd(rep.tc);
  rep.unique_braids = static_cast<int>(clusters.size());
  for (auto& [k, c] : clusters) {
    c.frequency = static_cast<double>(c.count) / rep.episodes;
    rep.braids.push_back(c);
  }
  std::stable_sort(rep.braids.begin(), rep.braids.end(),
                   [](const BraidCluster& a, const BraidCluster& b) { return a.tc < b.tc; });
  std::vector<double> s = rep.tc;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i + 1 == s.size() || s[i + 1] != s[i]) rep.cdf.push_back({s[i], static_cast<double>(i + 1) / s.size()});
  return rep;
}

namespace detail {
inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
inline std::string quote(const std::string& s) { return "\"" + s + "\""; }
}  // namespace detail

using NamedReport = std::pair<std::string, SceneReport>;

inline void write_scene_report(std::ostream& os, const std::vector<NamedReport>& reps) {
  os << "scene,episodes,agents_mean,agents_sd,unique_braids,tc_mean,tc_sd,skipped\n";
  for (const auto& [name, r] : reps)
    os << name << ',' << r.episodes << ',' << detail::fmt(r.agents_mean) << ',' << detail::fmt(r.agents_sd) << ','
       << r.unique_braids << ',' << detail::fmt(r.tc_mean) << ',' << detail::fmt(r.tc_sd) << ',' << r.skipped << '\n';
}

inline void write_tc_cdf(std::ostream& os, const std::vector<NamedReport>& reps) {
  os << "scene,tc,cdf\n";
  for (const auto& [name, r] : reps)
    for (const auto& [tc, p] : r.cdf) os << name << ',' << detail::fmt(tc) << ',' << detail::fmt(p) << '\n';
}

inline void write_braid_frequency(std::ostream& os, const std::vector<NamedReport>& reps) {
  os << "scene,braid,tc,count,frequency\n";
  for (const auto& [name, r] : reps)
    for (const auto& c : r.braids)
      os << name << ',' << detail::quote(c.key) << ',' << detail::fmt(c.tc) << ',' << c.count << ','
         << detail::fmt(c.frequency) << '\n';
}

}  // namespace braidnav
