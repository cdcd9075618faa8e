// braidnav: braid algebra, trajectory extraction, intersection sweeps and
// dataset reports from the command line.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "braidnav/braid.hpp"
#include "braidnav/complexity.hpp"
#include "braidnav/dataset.hpp"
#include "braidnav/experiments.hpp"
#include "braidnav/topology.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace braidnav;

namespace {

constexpr std::uint64_t kDefaultSeed = 2024;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Fixed-point with trailing zeros trimmed, keeping one decimal: 2 -> "2.0".
std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  while (s.size() > 2 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Writes every file or none: contents are prepared up front and only the
// directory creation and the writes themselves can fail here.
void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  fs::create_directories(dir);
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("failed writing " + (dir / name).string());
  }
}

ProjectionFrame frame_from(const json& j) {
  ProjectionFrame f;
  if (j.contains("eta")) f.eta = {j["eta"].at(0).get<double>(), j["eta"].at(1).get<double>()};
  if (j.contains("nu")) f.nu = {j["nu"].at(0).get<double>(), j["nu"].at(1).get<double>()};
  check_frame(f);
  return f;
}

// --- braid ---------------------------------------------------------------

int braid_cmd(const std::string& action, const std::vector<std::string>& words) {
  std::vector<BraidWord> w;
  for (const auto& s : words) {
    try {
      w.push_back(parse_word(s));
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: cannot parse \"" << s << "\": " << e.what() << "\n";
      return 2;
    }
  }
  const std::size_t need = action == "equiv" ? 2 : 1;
  if (w.size() != need) {
    std::cerr << "error: braid " << action << " takes " << need << " word(s)\n";
    return 2;
  }
  if (action == "reduce") {
    std::cout << to_string(relation_simplify(w[0])) << "\n";
  } else if (action == "tc") {
    std::cout << decimal(topological_complexity(w[0]).tc) << "\n";
  } else if (action == "perm") {
    auto p = permutation_of(w[0]);
    for (std::size_t i = 0; i < p.size(); ++i) std::cout << (i ? " " : "") << p[i];
    std::cout << "\n";
  } else {
    if (w[0].n != w[1].n) {
      std::cerr << "error: words have different strand counts\n";
      return 2;
    }
    std::cout << (is_equivalent(w[0], w[1]) ? "true" : "false") << "\n";
  }
  return 0;
}

// --- extract -------------------------------------------------------------

int extract_cmd(const std::string& path, bool lenient, bool events, const std::string& config) {
  ProjectionFrame frame;
  if (!config.empty()) frame = frame_from(read_json(config).value("frame", json::object()));
  auto res = ingest(read_file(path));
  for (const auto& d : res.diagnostics) std::cerr << path << ": " << d << "\n";
  if (!res.rejected_agents.empty() && !lenient) {
    std::cerr << "error: " << res.rejected_agents.size() << " agent(s) rejected (use --lenient to skip them)\n";
    return 1;
  }
  if (res.trajectories.empty()) {
    std::cerr << "error: no trajectories in " << path << "\n";
    return 1;
  }
  auto xs = make_system(res.trajectories);
  auto [word, log] = extract_braid(xs, frame);
  std::cout << to_string(free_reduce(word)) << "\n";
  if (events)
    for (const auto& e : log)
      std::cout << "# t=" << fixed6(e.time) << " slot=" << e.slot << " sign=" << e.sign << " " << e.agents.first
                << "/" << e.agents.second << "\n";
  return 0;
}

// --- simulate ------------------------------------------------------------

struct SimPlan {
  std::string scenario;
  std::vector<std::pair<Condition, bool>> conditions;  // (condition, primed)
  std::uint64_t seed = kDefaultSeed;
  PlannerConfig planner;
};

std::pair<Condition, bool> parse_tag(std::string tag) {
  bool primed = !tag.empty() && tag.back() == '\'';
  if (primed) tag.pop_back();
  try {
    return {parse_condition(tag), primed};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int simulate_cmd(SimPlan plan, const std::vector<std::string>& cond_flags, bool primed_flag, const std::string& out,
                 int jobs, bool quiet) {
  if (!cond_flags.empty()) {
    plan.conditions.clear();
    for (const auto& c : cond_flags) plan.conditions.push_back(parse_tag(c));
  }
  if (plan.conditions.empty())
    for (int k = 0; k < 5; ++k) plan.conditions.push_back({static_cast<Condition>(k), false});
  if (primed_flag)
    for (auto& c : plan.conditions) c.second = true;
  if (plan.scenario.empty()) throw UsageError("simulate needs --scenario or a config naming one");
  try {
    generate_scenarios(plan.scenario);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::ostringstream results, plot;
  results << "scenario,condition,experiment_idx,collided,max_time,executed_braid\n";
  plot << "scenario,condition,runs,collision_rate,collision_sd,time_median,time_q25,time_q75\n";
  json summary = {{"scenario", plan.scenario}, {"seed", plan.seed}, {"conditions", json::array()}};
  for (auto [c, primed] : plan.conditions) {
    auto rows = run_batch(plan.scenario, c, primed, plan.seed, jobs, plan.planner);
    for (const auto& r : rows)
      results << r.scenario << ',' << r.condition << ',' << r.index << ',' << (r.result.collided ? 1 : 0) << ','
              << fixed6(r.result.max_time) << ",\""
              << (r.result.braid_ok ? to_string(r.result.executed_braid) : std::string("NA")) << "\"\n";
    Summary s = aggregate(rows);
    const std::string tag = condition_tag(c, primed);
    plot << plan.scenario << ',' << tag << ',' << s.runs << ',' << fixed6(s.collision_rate) << ','
         << fixed6(s.collision_sd) << ',' << fixed6(s.time_median) << ',' << fixed6(s.time_q25) << ','
         << fixed6(s.time_q75) << '\n';
    summary["conditions"].push_back({{"condition", tag},
                                     {"runs", s.runs},
                                     {"collision_rate", s.collision_rate},
                                     {"collision_sd", s.collision_sd},
                                     {"time_median", s.time_median},
                                     {"time_q25", s.time_q25},
                                     {"time_q75", s.time_q75}});
    if (!quiet) {
      char line[256];
      std::snprintf(line, sizeof line, "%s %-3s runs=%d collision=%.3f (sd %.3f) max_time median=%.2f s [%.2f, %.2f]",
                    plan.scenario.c_str(), tag.c_str(), s.runs, s.collision_rate, s.collision_sd, s.time_median,
                    s.time_q25, s.time_q75);
      std::cout << line << std::endl;
    }
  }
  write_outputs(out, {{"results.csv", results.str()}, {"summary.json", summary.dump(2) + "\n"}, {"plot.csv", plot.str()}});
  if (quiet) std::cout << plot.str();
  return 0;
}

SimPlan plan_from_config(const std::string& path) {
  SimPlan p;
  json j = read_json(path);
  try {
    p.scenario = j.value("scenario", "");
    p.seed = j.value("seed", kDefaultSeed);
    if (j.contains("conditions"))
      for (const auto& c : j["conditions"]) p.conditions.push_back(parse_tag(c.get<std::string>()));
    const json pl = j.value("planner", json::object());
    p.planner.collision.a = pl.value("a", p.planner.collision.a);
    p.planner.collision.delta = pl.value("delta", p.planner.collision.delta);
    p.planner.v_low_ratio = pl.value("v_low_ratio", p.planner.v_low_ratio);
    p.planner.horizon_cap = pl.value("horizon_cap", p.planner.horizon_cap);
    if (pl.contains("frame")) p.planner.frame = frame_from(pl["frame"]);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
  if (!(p.planner.collision.a > 0) || !(p.planner.v_low_ratio > 0 && p.planner.v_low_ratio < 1) ||
      !(p.planner.horizon_cap > 0))
    throw UsageError(path + ": planner constants out of range");
  return p;
}

// --- analyze -------------------------------------------------------------

const std::set<std::string> kReportNames{"scene_report.csv", "tc_cdf.csv", "braid_frequency.csv"};

int analyze_cmd(const std::string& dir, const std::string& config, bool lenient, bool sliding, double stride,
                const std::string& out, int jobs) {
  EpisodeConfig ec;
  ProjectionFrame frame;
  if (!config.empty()) {
    json j = read_json(config);
    try {
      ec.episode_duration = j.value("episode_duration", ec.episode_duration);
      ec.min_pairwise_distance_filter = j.value("min_pairwise_distance_filter", ec.min_pairwise_distance_filter);
      ec.stationary_speed_threshold = j.value("stationary_speed_threshold", ec.stationary_speed_threshold);
      ec.sliding = j.value("sliding", ec.sliding);
      ec.stride = j.value("stride", ec.stride);
      if (j.contains("frame")) frame = frame_from(j["frame"]);
    } catch (const json::exception& e) {
      throw UsageError(config + ": " + e.what());
    }
  }
  if (sliding) ec.sliding = true;
  if (stride > 0) ec.stride = stride;
  try {
    check_config(ec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!fs::is_directory(dir)) throw UsageError("'" + dir + "' is not a directory");

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv" && !kReportNames.count(e.path().filename().string()))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<NamedReport> reps;
  bool rejected = false;
  for (const auto& f : files) {
    IngestResult res;
    try {
      res = ingest(read_file(f.string()));
    } catch (const std::invalid_argument& e) {
      std::cerr << f.string() << ": " << e.what() << "\n";
      rejected = true;
      continue;
    }
    for (const auto& d : res.diagnostics) std::cerr << f.string() << ": " << d << "\n";
    if (!res.rejected_agents.empty()) rejected = true;
    auto rep = analyze_scene(slice_episodes(res.trajectories, ec), frame, jobs);
    for (const auto& d : rep.diagnostics) std::cerr << f.string() << ": " << d << "\n";
    reps.push_back({f.stem().string(), std::move(rep)});
  }
  if (rejected && !lenient) {
    std::cerr << "error: ingestion rejected agents or files (use --lenient to continue)\n";
    return 1;
  }
  std::ostringstream a, b, c;
  write_scene_report(a, reps);
  write_tc_cdf(b, reps);
  write_braid_frequency(c, reps);
  write_outputs(out, {{"scene_report.csv", a.str()}, {"tc_cdf.csv", b.str()}, {"braid_frequency.csv", c.str()}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Braids of multi-agent trajectories: algebra, extraction, simulation and dataset reports"};
  app.require_subcommand(1);

  auto* braid = app.add_subcommand("braid", "Braid word algebra");
  std::string action;
  std::vector<std::string> words;
  braid->add_option("action", action, "reduce | tc | perm | equiv")
      ->required()
      ->check(CLI::IsMember({"reduce", "tc", "perm", "equiv"}));
  braid->add_option("words", words, "word(s) like \"n=3: 1 -2\"")->required();

  auto* extract = app.add_subcommand("extract", "Braid of a trajectory CSV (agent_id,t,x,y)");
  std::string traj;
  bool ex_lenient = false, ex_events = false;
  std::string ex_config;
  extract->add_option("csv", traj)->required()->check(CLI::ExistingFile);
  extract->add_option("--config", ex_config, "JSON with an optional projection frame")->check(CLI::ExistingFile);
  extract->add_flag("--lenient", ex_lenient, "skip rejected agents instead of failing");
  extract->add_flag("--events", ex_events, "also list crossing events");

  auto* sim = app.add_subcommand("simulate", "Scenario sweep at the four-way intersection");
  std::string scenario, sim_config, sim_out = "sim_out";
  std::vector<std::string> conds;
  bool primed = false, quiet = false;
  std::uint64_t seed = kDefaultSeed;
  int sim_jobs = default_jobs();
  sim->add_option("--scenario", scenario, "S1 | S2 | S3");
  sim->add_option("--config", sim_config, "JSON scenario config")->check(CLI::ExistingFile);
  sim->add_option("--condition", conds, "C1..C5, a trailing ' marks agent 1 inattentive (repeatable)");
  sim->add_flag("--primed", primed, "agent 1 is inattentive in every condition");
  sim->add_option("--out", sim_out, "output directory")->capture_default_str();
  auto* seed_opt = sim->add_option("--seed", seed, "master seed")->capture_default_str();
  sim->add_option("--jobs", sim_jobs, "worker threads")->check(CLI::PositiveNumber);
  sim->add_flag("--quiet", quiet, "print only the summary CSV");

  auto* an = app.add_subcommand("analyze", "Braid and TC reports for a directory of scene CSVs");
  std::string an_dir, an_config, an_out = ".";
  bool an_lenient = false, an_sliding = false;
  double an_stride = 0;
  int an_jobs = default_jobs();
  an->add_option("dir", an_dir)->required();
  an->add_option("--config", an_config, "JSON episode config")->check(CLI::ExistingFile);
  an->add_flag("--lenient", an_lenient, "continue past rejected agents");
  an->add_flag("--sliding", an_sliding, "overlapping windows instead of tiling");
  an->add_option("--stride", an_stride, "window stride in seconds (with --sliding)")->check(CLI::PositiveNumber);
  an->add_option("--out", an_out, "output directory")->capture_default_str();
  an->add_option("--jobs", an_jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* en = app.add_subcommand("enumerate", "Outcome counts: joint trajectories vs braids");
  unsigned en_n = 0, en_T = 3, en_U = 2, en_H = 10;
  en->add_option("--n", en_n, "agents")->required()->check(CLI::Range(2u, 64u));
  en->add_option("--paths", en_T, "paths per agent")->capture_default_str()->check(CLI::Range(1u, 1000u));
  en->add_option("--controls", en_U, "controls per step")->capture_default_str()->check(CLI::Range(1u, 1000u));
  en->add_option("--horizon", en_H, "planning steps")->capture_default_str()->check(CLI::Range(1u, 100000u));

  CLI11_PARSE(app, argc, argv);

  try {
    if (braid->parsed()) return braid_cmd(action, words);
    if (extract->parsed()) return extract_cmd(traj, ex_lenient, ex_events, ex_config);
    if (sim->parsed()) {
      SimPlan plan;
      if (!sim_config.empty()) plan = plan_from_config(sim_config);
      if (!scenario.empty()) plan.scenario = scenario;
      if (seed_opt->count() > 0 || sim_config.empty()) plan.seed = seed;
      return simulate_cmd(plan, conds, primed, sim_out, sim_jobs, quiet);
    }
    if (an->parsed()) return analyze_cmd(an_dir, an_config, an_lenient, an_sliding, an_stride, an_out, an_jobs);
    if (en->parsed()) {
      std::cout << "trajectory_count=" << cartesian_trajectory_count(en_T, en_U, en_n, en_H) << "\n";
      std::cout << "braid_bound=" << braid_outcome_bound(en_n) << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
