// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "braidnav/braid.hpp"
#include "braidnav/complexity.hpp"
#include "braidnav/dataset.hpp"
#include "braidnav/experiments.hpp"
#include "braidnav/planner.hpp"
#include "braidnav/topology.hpp"
#include "ensembles.hpp"
#include "oracle.hpp"

using namespace braidnav;

namespace {

// Tolerances and budgets.
constexpr double kTcAnchorTol = 1e-3;       // sigma_1^-1 in B_3
constexpr double kTcExactTol = 1e-9;        // sigma_1^-1 sigma_2 in B_3
constexpr double kTcRuntimeMs = 1.0;
constexpr double kAlgebraSeconds = 30.0;
constexpr double kExtractionSeconds = 60.0;
constexpr double kSweepSeconds = 30.0 * 60.0;
constexpr double kDatasetSeconds = 10.0;
constexpr double kBeliefTol = 1e-12;
constexpr double kHalf = 0.5;               // C2 vs C4 collision ratio
constexpr std::uint64_t kMasterSeed = 2024;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char b[64];
  std::snprintf(b, sizeof b, f, v);
  return b;
}

int failures = 0;
void report(int id, bool ok, const std::string& what) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  failures += !ok;
}

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1 -------------------------------------------------------------------------

void tc_anchors() {
  auto timed = [](const BraidWord& w, double& ms) {
    auto t0 = Clock::now();
    double tc = topological_complexity(w).tc;
    ms = seconds_since(t0) * 1e3;
    return tc;
  };
  double ms_a = 0, ms_b = 0;
  double a = timed(make_word(3, {-1}), ms_a);
  double b = timed(make_word(3, {-1, 2}), ms_b);
  bool ok_a = std::abs(a - 1.585) <= kTcAnchorTol, ok_b = std::abs(b - 2.0) <= kTcExactTol;
  bool fast = ms_a < kTcRuntimeMs && ms_b < kTcRuntimeMs;
  report(1, ok_a && ok_b && fast,
         "TC(s1^-1, B3) = " + fmt("%.6f", a) + " (want 1.585 +- 1e-3" + (ok_a ? "" : ", MISSED") +
             "); TC(s1^-1 s2, B3) = " + fmt("%.9f", b) + " (want 2.0 +- 1e-9" + (ok_b ? "" : ", MISSED") + "); " +
             fmt("%.3f", ms_a) + " ms / " + fmt("%.3f", ms_b) + " ms");
}

// 2 -------------------------------------------------------------------------

void algebra() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(kMasterSeed + 2);
  int fails = 0, far_checked = 0, adj_checked = 0;
  for (int it = 0; it < 1000; ++it) {
    int n = 2 + static_cast<int>(rng() % 5);
    auto w = oracle::random_word(rng, n, 20);
    auto v = oracle::random_word(rng, n, 20);
    if (!is_equivalent(compose(w, inverse(w)), identity(n))) ++fails;
    if (!is_equivalent(compose(inverse(w), w), identity(n))) ++fails;
    // relations spliced into random context u . r . v
    std::size_t cut = rng() % (w.size() + 1);
    auto splice = [&](std::vector<int> mid) {
      BraidWord x{n, std::vector<int>(w.letters.begin(), w.letters.begin() + cut)};
      x.letters.insert(x.letters.end(), mid.begin(), mid.end());
      x.letters.insert(x.letters.end(), w.letters.begin() + cut, w.letters.end());
      return x;
    };
    if (n >= 4) {
      int i = 1 + static_cast<int>(rng() % (n - 3));
      int j = i + 2 + static_cast<int>(rng() % (n - 2 - i));
      if (!is_equivalent(splice({i, j}), splice({j, i}))) ++fails;
      ++far_checked;
    }
    if (n >= 3) {
      int i = 1 + static_cast<int>(rng() % (n - 2));
      if (!is_equivalent(splice({i, i + 1, i}), splice({i + 1, i, i + 1}))) ++fails;
      ++adj_checked;
    }
    if (permutation_of(compose(w, v)) != compose_perm(permutation_of(v), permutation_of(w))) ++fails;
    if (topological_complexity(w).norm_after != topological_complexity(relation_simplify(w)).norm_after) ++fails;
  }
  double s = seconds_since(t0);
  report(2, fails == 0 && s < kAlgebraSeconds,
         "1000 words: " + std::to_string(fails) + " failures (" + std::to_string(far_checked) + " far, " +
             std::to_string(adj_checked) + " adjacent relation checks); " + fmt("%.2f", s) + " s");
}

// 3 -------------------------------------------------------------------------

void extraction() {
  using namespace ensembles;
  auto t0 = Clock::now();
  std::mt19937_64 rng(kMasterSeed + 3);
  int fails = 0, letters = 0;
  for (int it = 0; it < 200; ++it) {
    int n = 2 + static_cast<int>(rng() % 4);
    auto xs = random_ensemble(rng, n, 6);
    auto raw = extract_braid(xs).first;
    auto w = free_reduce(raw);
    letters += static_cast<int>(w.size());
    auto [ps, pd] = brute_ranks(xs);
    auto perm = permutation_of(raw);
    for (int a = 0; a < n; ++a) fails += perm[ps[a] - 1] != pd[a];
    auto same = [&](const SystemTrajectory& y) { return free_reduce(extract_braid(y).first) == w; };
    fails += !same(map_positions(xs, [](Vec2 q) { return Vec2{q.x + 123.4, q.y - 56.7}; }));
    fails += !same(map_positions(xs, [](Vec2 q) { return q * 3.7; }));
    auto warped = xs;
    for (double& t : warped.t) t = t * t * t + 0.5 * t;
    fails += !same(warped);
    fails += !same(refine(xs));
  }
  double s = seconds_since(t0);
  report(3, fails == 0 && s < kExtractionSeconds,
         "200 ensembles (n <= 5, " + std::to_string(letters) + " reduced letters): " + std::to_string(fails) +
             " failures; " + fmt("%.2f", s) + " s");
}

// 4 -------------------------------------------------------------------------

void counters() {
  bool ok = braid_outcome_bound(2) == 3 && braid_outcome_bound(3) == 27 && braid_outcome_bound(4) == 729;
  // |T|^n |U|^(nH) by hand
  ok &= cartesian_trajectory_count(3, 2, 2, 3) == 576;
  ok &= cartesian_trajectory_count(3, 4, 3, 5) == BigInt(27) * (BigInt(1) << 30);
  ok &= cartesian_trajectory_count(1, 1, 5, 7) == 1;
  int grid = 0, held = 0;
  for (unsigned n : {2u, 3u, 4u, 5u})
    for (unsigned H : {20u, 50u, 100u})
      for (unsigned U : {8u, 16u, 64u}) {
        ++grid;
        BigInt two_n2 = BigInt(1) << (n * n);
        BigInt traj = boost::multiprecision::pow(BigInt(U), n * H);
        held += braid_outcome_bound(n) <= two_n2 && two_n2 < traj && traj <= cartesian_trajectory_count(3, U, n, H);
      }
  report(4, ok && held == grid,
         "bounds (3, 27, 729) and hand counts " + std::string(ok ? "match" : "DIFFER") + "; 3^C(n,2) <= 2^(n^2) < "
             "|U|^(nH) holds on " + std::to_string(held) + "/" + std::to_string(grid) + " grid points");
}

// 5 and 6 -------------------------------------------------------------------

struct Cell {
  double rate = 0, median = 0;
};

Cell run_cell(const std::string& sc, Condition c, bool primed) {
  auto s = aggregate(run_batch(sc, c, primed, kMasterSeed, jobs()));
  return {s.collision_rate, s.time_median};
}

void sweeps() {
  auto t0 = Clock::now();
  const std::vector<std::string> scenarios{"S1", "S2", "S3"};
  std::map<std::string, std::map<int, Cell>> cell;
  for (const auto& sc : scenarios)
    for (int k = 0; k < 5; ++k) cell[sc][k] = run_cell(sc, static_cast<Condition>(k), false);
  double s = seconds_since(t0);

  std::ostringstream os;
  bool order = true, times = true;
  int halved = 0;
  for (const auto& sc : scenarios) {
    auto& m = cell[sc];
    auto r = [&](int k) { return m[k].rate; };
    auto t = [&](int k) { return m[k].median; };
    bool o = r(0) >= r(3) && r(3) >= r(1) && r(0) >= r(4) && r(4) >= r(2);
    bool tt = t(0) <= t(3) && t(3) <= t(1);
    bool h = r(1) <= kHalf * r(3);
    order &= o;
    times &= tt;
    halved += h;
    os << sc << " collisions C1..C5 = " << fmt("%.3f", r(0)) << "/" << fmt("%.3f", r(1)) << "/" << fmt("%.3f", r(2))
       << "/" << fmt("%.3f", r(3)) << "/" << fmt("%.3f", r(4)) << (o ? "" : " (order violated)")
       << ", median max_time C1/C4/C2 = " << fmt("%.2f", t(0)) << "/" << fmt("%.2f", t(3)) << "/" << fmt("%.2f", t(1))
       << (tt ? "" : " (order violated)") << "; ";
  }
  os << "C2 <= 0.5 C4 in " << halved << "/3 scenarios; " << fmt("%.1f", s) << " s";
  report(5, order && times && halved >= 2 && s < kSweepSeconds, os.str());

  std::ostringstream os6;
  bool ok6 = true;
  for (const char* sc : {"S2", "S3"}) {
    double c2 = run_cell(sc, Condition::C2, true).rate, c3 = run_cell(sc, Condition::C3, true).rate;
    double c4 = run_cell(sc, Condition::C4, true).rate, c5 = run_cell(sc, Condition::C5, true).rate;
    bool ok = std::max(c2, c3) < std::min(c4, c5);
    ok6 &= ok;
    os6 << sc << " C2'/C3'/C4'/C5' = " << fmt("%.3f", c2) << "/" << fmt("%.3f", c3) << "/" << fmt("%.3f", c4) << "/"
        << fmt("%.3f", c5) << (ok ? "" : " (order violated)") << "; ";
  }
  report(6, ok6, os6.str());
}

// 7 -------------------------------------------------------------------------

// One episode realising a braid word: agents in a row along x, each letter
// swaps the pair in its slots with the right-hand agent detouring in y.
void weave(std::ostringstream& csv, const BraidWord& w, double T0, double D, int tag, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> gap_d(3.0, 5.0), h_d(1.0, 2.0), drift_d(0.5, 1.5), x0_d(-20.0, 20.0);
  const double gap = gap_d(rng), h = h_d(rng), drift = drift_d(rng), x0 = x0_d(rng);
  const int n = w.n, L = static_cast<int>(w.size());
  // knots per agent: (t, x, y offset)
  struct Knot {
    double t, x, y;
  };
  std::vector<std::vector<Knot>> knots(n);
  std::vector<int> at(n);  // agent in each slot
  for (int a = 0; a < n; ++a) {
    at[a] = a;
    knots[a].push_back({T0, x0 + a * gap, 0.0});
  }
  std::vector<double> cuts{T0 + 1.0};
  std::uniform_real_distribution<double> share(0.5, 1.5);
  std::vector<double> len(L);
  double tot = 0;
  for (double& l : len) tot += (l = share(rng));
  for (double l : len) cuts.push_back(cuts.back() + l / tot * (D - 2.0));
  for (int k = 0; k < L; ++k) {
    int g = w.letters[k], i = std::abs(g) - 1;
    int left = at[i], right = at[i + 1];
    double ta = cuts[k], tb = cuts[k + 1], tm = 0.5 * (ta + tb);
    double xl = knots[left].back().x, xr = knots[right].back().x;
    knots[left].push_back({ta, xl, 0.0});
    knots[right].push_back({ta, xr, 0.0});
    knots[left].push_back({tb, xr, 0.0});
    knots[right].push_back({tm, 0.5 * (xl + xr), g > 0 ? -h : h});
    knots[right].push_back({tb, xl, 0.0});
    std::swap(at[i], at[i + 1]);
  }
  for (int a = 0; a < n; ++a) knots[a].push_back({T0 + D, knots[a].back().x, 0.0});
  const int frames = static_cast<int>(std::lround(D * 25));
  for (int a = 0; a < n; ++a) {
    std::size_t s = 0;
    for (int f = 0; f <= frames; ++f) {
      double t = T0 + f / 25.0;
      while (s + 2 < knots[a].size() && knots[a][s + 1].t <= t) ++s;
      const Knot &p = knots[a][s], &q = knots[a][s + 1];
      double u = q.t > p.t ? std::clamp((t - p.t) / (q.t - p.t), 0.0, 1.0) : 1.0;
      double x = p.x + (q.x - p.x) * u, y = p.y + (q.y - p.y) * u + drift * (t - T0);
      csv << "e" << tag << "_" << a << "," << f << "," << fmt("%.4f", t) << "," << fmt("%.6f", x) << ","
          << fmt("%.6f", y) << "\n";
    }
  }
}

std::string run_pipeline(const std::string& csv, int nj, SceneReport* out) {
  auto res = ingest(csv);
  auto rep = analyze_scene(slice_episodes(res.trajectories, {}), {}, nj);
  std::vector<NamedReport> named{{"synthetic", rep}};
  std::ostringstream a;
  write_scene_report(a, named);
  write_tc_cdf(a, named);
  write_braid_frequency(a, named);
  if (out) *out = rep;
  return a.str();
}

void dataset() {
  auto t0 = Clock::now();
  const std::vector<BraidWord> templates{parse_word("n=3: 1 2"), parse_word("n=3: -1 2"),
                                         parse_word("n=3: 1 -2 1 -2"), parse_word("n=4: 2 -1 3 -2 1")};
  std::mt19937_64 rng(kMasterSeed + 7);
  std::vector<int> order;
  for (int k = 0; k < 60; ++k) order.push_back(k % 4);
  std::shuffle(order.begin(), order.end(), rng);
  std::ostringstream csv;
  csv << "agent_id,frame,t,x,y\n";
  for (int e = 0; e < 60; ++e) weave(csv, templates[order[e]], 10.0 * e, 10.0, e, rng);

  SceneReport rep;
  std::string first = run_pipeline(csv.str(), 1, &rep);
  std::string second = run_pipeline(csv.str(), jobs() + 2, nullptr);
  double s = seconds_since(t0);

  int tc_ok = 0;
  for (const auto& tw : templates) {
    std::string key = to_string(relation_simplify(tw));
    double want = topological_complexity(tw).tc;
    for (const auto& c : rep.braids)
      if (c.key == key && c.count == 15 && std::abs(c.tc - want) < 1e-9) ++tc_ok;
  }
  bool cdf_ok = !rep.cdf.empty() && rep.cdf.back().second == 1.0;
  for (std::size_t i = 1; i < rep.cdf.size(); ++i) cdf_ok &= rep.cdf[i - 1].second <= rep.cdf[i].second;
  bool same = first == second;
  report(7, rep.episodes == 60 && rep.skipped == 0 && rep.unique_braids == 4 && tc_ok == 4 && cdf_ok && same &&
                s < kDatasetSeconds,
         std::to_string(rep.episodes) + " episodes, " + std::to_string(rep.unique_braids) + " unique braids, " +
             std::to_string(tc_ok) + "/4 template TCs matched, CDF " + (cdf_ok ? "valid" : "INVALID") + ", reports " +
             (same ? "byte-identical" : "DIFFER") + "; " + fmt("%.2f", s) + " s");
}

// 8 -------------------------------------------------------------------------

// South and east straights heading for the same conflict point; paths are
// known (C3), so the belief has exactly the four speed combinations.
void belief() {
  IntersectionMap map;
  const double far = map.lane_length + map.half_box(), c = map.lane_width / 2;
  const double pS = far + c - 21.0, pE = far - c - 20.0;  // 21 m and 20 m to the conflict point
  std::vector<std::array<Path, 3>> paths(2);
  for (int m = 0; m < 3; ++m) {
    paths[0][m] = build_path(Arm::South, kManeuvers[m]);
    paths[1][m] = build_path(Arm::East, kManeuvers[m]);
  }
  std::vector<AgentView> views(2);
  const double prog[2] = {pS, pE};
  for (int j = 0; j < 2; ++j) {
    views[j].origin = j ? Arm::East : Arm::South;
    views[j].intended = Maneuver::Straight;
    views[j].speeds = {3.0, 7.5, 0.7};
    const Path& p = paths[j][1];
    views[j].state = initial_state(p);
    views[j].state.progress = prog[j];
    views[j].state.pos = p.at(prog[j]);
  }
  Planner pl(views, &paths);

  // by hand: S at (c, yS0 + vS t), E at (xE0 - vE t, c) until arrival
  const double yS0 = -far + pS, xE0 = far - pE, len = 2 * far;
  const double ph = 0.7, va[2] = {3.0, 7.5};
  std::map<std::string, double> want, want_lo, want_hi;
  for (int hs = 0; hs < 2; ++hs)
    for (int he = 0; he < 2; ++he) {
      double vS = va[hs], vE = va[he];
      double T = std::min((len - pS) / vS, (len - pE) / vE);
      double d0x = c - xE0, d0y = yS0 - c, wx = vE, wy = vS;
      double ts = std::clamp(-(d0x * wx + d0y * wy) / (wx * wx + wy * wy), 0.0, T);
      double dmin = std::hypot(d0x + wx * ts, d0y + wy * ts);
      // E (starting right of S along x) crosses S's column at t*; S below
      // E's lane at that moment means E passes on the north side
      double tstar = (xE0 - c) / vE;
      std::string key = yS0 + vS * tstar < c ? "n=2: -1" : "n=2: 1";
      double keep = 1.0 - 1.0 / (1.0 + std::exp(2.0 * (dmin - 3.0)));
      double pE_ = he ? ph : 1 - ph;
      want[key] += (hs ? ph : 1 - ph) * pE_ * keep;
      (hs ? want_hi : want_lo)[key] += pE_ * keep;
    }
  auto got = pl.compute_belief(0, Condition::C3);
  double worst = 0;
  bool keys = got.mass.size() == want.size();
  for (const auto& [k, m] : want) {
    if (!got.mass.count(k)) {
      keys = false;
      continue;
    }
    worst = std::max(worst, std::abs(got.mass.at(k) - m));
  }
  double raw_total = pl.compute_belief(0, Condition::C3, std::nullopt, false).total();
  auto H = [](const std::map<std::string, double>& m) {
    double tot = 0, h = 0;
    for (const auto& [k, v] : m) tot += v;
    for (const auto& [k, v] : m)
      if (v > 0) h -= v / tot * std::log2(v / tot);
    return h;
  };
  double h_lo = H(want_lo), h_hi = H(want_hi);
  double best = h_lo < h_hi ? 3.0 : 7.5;
  double chosen = pl.select_action(0, Condition::C3);
  bool ok = keys && worst <= kBeliefTol && std::abs(raw_total - 1.0) <= kBeliefTol && chosen == best;
  report(8, ok,
         std::to_string(want.size()) + " outcomes, max |mass - hand| = " + fmt("%.2e", worst) + ", unfiltered total = " +
             fmt("%.15f", raw_total) + ", H(low) = " + fmt("%.4f", h_lo) + ", H(high) = " + fmt("%.4f", h_hi) +
             ", select_action = " + fmt("%.1f", chosen) + " (exhaustive " + fmt("%.1f", best) + ")");
}

}  // namespace

int main() {
  tc_anchors();
  algebra();
  extraction();
  counters();
  sweeps();
  dataset();
  belief();
  return failures;
}
