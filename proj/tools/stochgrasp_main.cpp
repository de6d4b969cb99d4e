// Copyright 2026 The stochgrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// stochgrasp command-line driver.
//
// Exit codes: 0 success, 2 input/config error, 3 planning failure,
// 4 internal invariant violation.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stochgrasp/eval.hpp"
#include "stochgrasp/io.hpp"
#include "stochgrasp/svg.hpp"

#ifndef STOCHGRASP_VERSION
#define STOCHGRASP_VERSION "0.0.0"
#endif

namespace sg = stochgrasp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitPlanning = 3;
constexpr int kExitInternal = 4;

// Seed streams derived from --seed.
constexpr std::uint64_t kPlannerStream = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Written when a command starts and rewritten with the end time and exit
// code when it finishes.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv, std::uint64_t seed)
      : command_(std::move(command)), argv_(std::move(argv)), seed_(seed) {}

  void add_config(const std::string& role, const std::string& path) {
    if (!path.empty()) configs_[role] = path;
  }

  void begin(const std::string& output_dir, const std::string& path) {
    output_dir_ = output_dir;
    path_ = path;
    start_ = utc_now();
    write(std::nullopt);
  }

  void finish(int exit_code) {
    if (!path_.empty()) write(exit_code);
  }

 private:
  void write(std::optional<int> exit_code) const {
    json j = {{"command", command_},
              {"argv", argv_},
              {"configs", configs_},
              {"master_seed", seed_},
              {"tool_version", STOCHGRASP_VERSION},
              {"output", output_dir_},
              {"start", start_},
              {"end", exit_code ? json(utc_now()) : json(nullptr)},
              {"exit_code", exit_code ? json(*exit_code) : json(nullptr)}};
    sg::write_text_file(path_, j.dump(2) + "\n");
  }

  std::string command_;
  std::vector<std::string> argv_;
  std::uint64_t seed_;
  std::map<std::string, std::string> configs_;
  std::string output_dir_;
  std::string path_;
  std::string start_;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw sg::ConfigError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) {
      throw InputError(std::string(what) + ": '" + cell + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_ids(const std::string& text, std::size_t count, const char* what) {
  std::vector<int> ids;
  for (double v : parse_numbers(text, what)) {
    if (v != std::floor(v)) throw InputError(std::string(what) + ": ids must be integers");
    ids.push_back(static_cast<int>(v));
  }
  if (ids.size() != count) {
    throw InputError(std::string(what) + ": expected " + std::to_string(count) + " ids");
  }
  return ids;
}

struct Configs {
  sg::RobotModel robot;
  sg::PlannerConfig planner;
  sg::ScpConfig scp;
};

struct ConfigPaths {
  std::string robot, planner, scp;

  void attach(CLI::App* cmd) {
    cmd->add_option("--robot", robot, "robot model (JSON)");
    cmd->add_option("--planner-config", planner, "planner settings (JSON)");
    cmd->add_option("--scp", scp, "SCP settings (JSON)");
  }

  Configs load(RunManifest* manifest) const {
    Configs c;
    if (!robot.empty()) c.robot = sg::robot_from_json(sg::read_text_file(robot));
    if (!planner.empty()) c.planner = sg::planner_from_json(sg::read_text_file(planner));
    if (!scp.empty()) c.scp = sg::scp_from_json(sg::read_text_file(scp));
    manifest->add_config("robot", robot);
    manifest->add_config("planner", planner);
    manifest->add_config("scp", scp);
    return c;
  }
};

// ------------------------------------------------------------------ gen-env

struct GenEnvArgs {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen_env(const GenEnvArgs& a, RunManifest* manifest) {
  manifest->add_config("envgen", a.config);
  const sg::EnvGenConfig cfg = sg::envgen_from_json(sg::read_text_file(a.config));
  manifest->begin(fs::path(a.out).parent_path().string(), a.out + ".manifest.json");
  const sg::Environment env = sg::generate_random_environment(cfg, a.seed);
  sg::write_text_file(a.out, sg::environment_to_json(env));
  std::cout << "wrote " << a.out << " (" << env.anchors.size() << " anchors)\n";
  return kExitOk;
}

// --------------------------------------------------------------------- plan

struct PlanArgs {
  std::string env;
  std::string start = "auto";
  std::string goal;
  std::string planner = "rbp";
  std::string out;
  std::uint64_t seed = 1;
  ConfigPaths paths;
};

void write_phase_files(const std::string& dir, std::size_t index, const sg::PhaseRecord& ph,
                       const sg::Environment& env, const sg::RobotModel& robot) {
  char stem[64];
  std::snprintf(stem, sizeof stem, "phase_%02zu_%s", index, sg::to_string(ph.phase));
  const std::string base = join(dir, stem);
  sg::write_text_file(base + ".json", sg::trajectory_to_json(ph.optimized, env, robot));
  sg::write_text_file(base + "_seed.json", sg::trajectory_to_json(ph.seed, env, robot));
  sg::write_text_file(base + ".csv", sg::trajectory_csv(ph.optimized, env, robot));
  sg::write_text_file(base + "_seed.csv", sg::trajectory_csv(ph.seed, env, robot));
  const auto opt_cols =
      sg::trajectory_columns_from_json(sg::trajectory_to_json(ph.optimized, env, robot));
  const auto seed_cols =
      sg::trajectory_columns_from_json(sg::trajectory_to_json(ph.seed, env, robot));
  sg::write_text_file(base + ".svg", sg::trajectory_plot_svg(opt_cols, &seed_cols));
}

int cmd_plan(const PlanArgs& a, RunManifest* manifest) {
  Configs cfg = a.paths.load(manifest);
  manifest->add_config("env", a.env);
  const sg::Environment env = sg::environment_from_json(sg::read_text_file(a.env));
  if (a.planner != "rbp" && a.planner != "naive") {
    throw InputError("--planner must be rbp or naive");
  }
  const auto goal_v = parse_numbers(a.goal, "--goal");
  if (goal_v.size() != 2) throw InputError("--goal: expected X,Y");
  const sg::Vec2 goal(goal_v[0], goal_v[1]);
  cfg.planner.rng_seed = sg::derive_seed(a.seed, kPlannerStream);

  sg::Stance start;
  if (a.start == "auto") {
    const auto found =
        sg::find_start_stance(sg::corridor_endpoints(env).first, env, cfg.robot, cfg.planner);
    if (!found) {
      std::cerr << "no feasible start stance near the corridor entrance\n";
      return kExitPlanning;
    }
    start = found->first;
  } else {
    const auto ids = parse_ids(a.start, sg::kNumBooms, "--start-stance");
    for (int i = 0; i < sg::kNumBooms; ++i) {
      if (!env.find_anchor(ids[i])) {
        throw InputError("--start-stance: unknown anchor id " + std::to_string(ids[i]));
      }
      start.anchor_ids[i] = ids[i];
    }
  }

  ensure_dir(a.out);
  manifest->begin(a.out, join(a.out, "manifest.json"));

  const auto t0 = std::chrono::steady_clock::now();
  const auto plan =
      a.planner == "rbp"
          ? sg::plan_footsteps(start, goal, env, cfg.robot, cfg.planner)
          : sg::plan_footsteps_naive(start, goal, env, cfg.robot, cfg.planner);
  const double footstep_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!plan) {
    std::cerr << "no footstep plan from " << start.to_string() << " to the goal\n";
    return kExitPlanning;
  }
  sg::write_text_file(join(a.out, "plan.json"), sg::footstep_plan_to_json(*plan, env, cfg.robot));

  if (a.planner == "naive") {
    json report = {{"planner", "naive"},
                   {"transitions", plan->transitions()},
                   {"success_probability", std::exp(plan->est_success_log_prob)},
                   {"footstep_seconds", footstep_s}};
    sg::write_text_file(join(a.out, "report.json"), report.dump(2) + "\n");
    std::cout << "naive plan: " << plan->transitions() << " transitions, success probability "
              << std::exp(plan->est_success_log_prob) << "\n";
    return kExitOk;
  }

  const sg::PlanResult res = sg::plan_full(*plan, env, cfg.robot, cfg.scp, cfg.planner);
  for (std::size_t i = 0; i < res.phases.size(); ++i) {
    write_phase_files(a.out, i, res.phases[i], env, cfg.robot);
  }
  sg::write_text_file(join(a.out, "scp_log.csv"), sg::scp_log_csv(res.phases));
  sg::write_text_file(join(a.out, "timings.csv"),
                      "footstep_seconds," + sg::format_number(footstep_s) + "\n" +
                          sg::phase_timings_csv(res.phases));
  json report = json::parse(sg::plan_report_json(res, env, cfg.robot));
  report["planner"] = "rbp";
  report["footstep_seconds"] = footstep_s;
  sg::write_text_file(join(a.out, "report.json"), report.dump(2) + "\n");
  if (!res.complete) {
    std::cerr << "trajectory generation failed at transition " << *res.failed_transition << ": "
              << res.failure << "\n";
    return kExitPlanning;
  }
  int degraded = 0;
  for (const auto& ph : res.phases) degraded += ph.degraded ? 1 : 0;
  std::cout << "rbp plan: " << plan->transitions() << " transitions, success probability "
            << std::exp(res.success_log_prob) << ", " << degraded << " degraded phases\n";
  return kExitOk;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  std::string env;
  int trials = 0;
  std::string envgen;
  int mc_samples = 10000;
  std::string out;
  std::uint64_t seed = 1;
  ConfigPaths paths;
};

int cmd_eval(const EvalArgs& a, RunManifest* manifest) {
  if (a.mc_samples < sg::kMinMonteCarloSamples) {
    throw InputError("--mc-samples must be at least " +
                     std::to_string(sg::kMinMonteCarloSamples));
  }
  if (a.env.empty() == (a.trials == 0)) {
    throw InputError("give exactly one of --env or --trials");
  }
  const Configs cfg = a.paths.load(manifest);
  sg::TrialConfig tc;
  tc.robot = cfg.robot;
  tc.planner = cfg.planner;
  tc.scp = cfg.scp;
  tc.mc_samples = a.mc_samples;

  std::vector<sg::TrialRecord> records;
  if (!a.env.empty()) {
    manifest->add_config("env", a.env);
    const sg::Environment env = sg::environment_from_json(sg::read_text_file(a.env));
    ensure_dir(a.out);
    manifest->begin(a.out, join(a.out, "manifest.json"));
    records = sg::run_environment_trial(0, env, tc, a.seed);
  } else {
    if (a.trials < 1) throw InputError("--trials must be at least 1");
    manifest->add_config("envgen", a.envgen);
    if (!a.envgen.empty()) tc.envgen = sg::envgen_from_json(sg::read_text_file(a.envgen));
    ensure_dir(a.out);
    manifest->begin(a.out, join(a.out, "manifest.json"));
    records = sg::run_trials(a.trials, tc, a.seed);
  }

  const sg::Histogram hist = sg::success_histogram(records);
  const auto timings = sg::timing_summary(records);
  sg::write_text_file(join(a.out, "trials.csv"), sg::trials_csv(records));
  sg::write_text_file(join(a.out, "histogram.csv"), sg::histogram_csv(hist));
  sg::write_text_file(join(a.out, "timings.csv"), sg::timings_csv(timings));
  sg::write_text_file(join(a.out, "histogram.svg"), sg::histogram_svg(hist));
  for (sg::PlannerKind k : {sg::PlannerKind::rbp, sg::PlannerKind::naive}) {
    int found = 0;
    for (const auto& r : records) found += (r.planner == k && r.plan_found) ? 1 : 0;
    std::cout << sg::to_string(k) << ": " << found << " plans, median success "
              << sg::median_success(records, k) << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------- plot, analyze-log

struct PlotArgs {
  std::string traj;
  std::string seed_traj;
  std::string out;
};

int cmd_plot(const PlotArgs& a, RunManifest* manifest) {
  manifest->add_config("traj", a.traj);
  manifest->add_config("seed_traj", a.seed_traj);
  const auto cols = sg::trajectory_columns_from_json(sg::read_text_file(a.traj));
  std::optional<sg::StoredTrajectoryColumns> seed;
  if (!a.seed_traj.empty()) {
    seed = sg::trajectory_columns_from_json(sg::read_text_file(a.seed_traj));
  }
  manifest->begin(fs::path(a.out).parent_path().string(), a.out + ".manifest.json");
  sg::write_text_file(a.out, sg::trajectory_plot_svg(cols, seed ? &*seed : nullptr));
  return kExitOk;
}

struct AnalyzeArgs {
  std::string log;
  std::string env;
  std::string anchors;
  std::string out;
};

int cmd_analyze_log(const AnalyzeArgs& a, RunManifest* manifest) {
  manifest->add_config("log", a.log);
  manifest->add_config("env", a.env);
  const auto log = sg::parse_force_log_csv(sg::read_text_file(a.log));
  const sg::Environment env = sg::environment_from_json(sg::read_text_file(a.env));
  const auto ids = parse_ids(a.anchors, sg::kNumBooms, "--anchors");
  std::array<sg::Anchor, sg::kNumBooms> anchors;
  for (int i = 0; i < sg::kNumBooms; ++i) {
    const sg::Anchor* an = env.find_anchor(ids[i]);
    if (!an) throw InputError("--anchors: unknown anchor id " + std::to_string(ids[i]));
    anchors[i] = *an;
  }
  ensure_dir(a.out);
  manifest->begin(a.out, join(a.out, "manifest.json"));
  const auto analysis = sg::analyze_force_log(log, anchors);
  sg::write_text_file(join(a.out, "analysis.csv"), sg::force_log_analysis_csv(analysis));
  sg::write_text_file(join(a.out, "probability.svg"), sg::force_log_svg(analysis));
  int flagged = 0;
  for (const auto& row : analysis.out_of_surface) {
    for (bool f : row) flagged += f ? 1 : 0;
  }
  std::cout << analysis.time.size() << " entries, " << flagged << " out-of-surface samples\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stance planning and trajectory optimization for a boom climber with "
               "stochastic grasps"};
  app.set_version_flag("--version", STOCHGRASP_VERSION);
  app.require_subcommand(1);

  GenEnvArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-env", "generate a random corridor environment");
  gen_cmd->add_option("--config", gen.config, "generator config (JSON)")->required();
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--out", gen.out, "environment file to write")->required();

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "plan footsteps and trajectories");
  plan_cmd->add_option("--env", plan.env, "environment file")->required();
  plan_cmd->add_option("--start-stance", plan.start, "four anchor ids, or 'auto'");
  plan_cmd->add_option("--goal", plan.goal, "goal position X,Y")->required();
  plan_cmd->add_option("--planner", plan.planner, "rbp or naive");
  plan_cmd->add_option("--out", plan.out, "output directory")->required();
  plan_cmd->add_option("--seed", plan.seed, "master seed");
  plan.paths.attach(plan_cmd);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "compare planners over randomized trials");
  eval_cmd->add_option("--env", ev.env, "single environment file");
  eval_cmd->add_option("--trials", ev.trials, "number of generated environments");
  eval_cmd->add_option("--envgen", ev.envgen, "generator config (JSON)");
  eval_cmd->add_option("--mc-samples", ev.mc_samples, "Monte Carlo samples per plan");
  eval_cmd->add_option("--out", ev.out, "output directory")->required();
  eval_cmd->add_option("--seed", ev.seed, "master seed");
  ev.paths.attach(eval_cmd);

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "plot a trajectory file");
  plot_cmd->add_option("--traj", plot.traj, "trajectory file")->required();
  plot_cmd->add_option("--seed-traj", plot.seed_traj, "seed trajectory to overlay");
  plot_cmd->add_option("--out", plot.out, "SVG file to write")->required();

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze-log", "grasp success along a force log");
  an_cmd->add_option("--log", an.log, "CSV with header time,f1..f4,a1..a4")->required();
  an_cmd->add_option("--env", an.env, "environment file")->required();
  an_cmd->add_option("--anchors", an.anchors, "anchor ids for the four log channels")
      ->required();
  an_cmd->add_option("--out", an.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::vector<std::string> args(argv, argv + argc);
  CLI::App* cmd = app.get_subcommands().front();
  std::uint64_t seed = 0;
  if (cmd == gen_cmd) seed = gen.seed;
  if (cmd == plan_cmd) seed = plan.seed;
  if (cmd == eval_cmd) seed = ev.seed;
  RunManifest manifest(cmd->get_name(), args, seed);

  int code = kExitInternal;
  try {
    if (cmd == gen_cmd) code = cmd_gen_env(gen, &manifest);
    if (cmd == plan_cmd) code = cmd_plan(plan, &manifest);
    if (cmd == eval_cmd) code = cmd_eval(ev, &manifest);
    if (cmd == plot_cmd) code = cmd_plot(plot, &manifest);
    if (cmd == an_cmd) code = cmd_analyze_log(an, &manifest);
  } catch (const sg::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kExitInput;
  } catch (const sg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    code = kExitInternal;
  }
  try {
    manifest.finish(code);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (code == kExitOk) code = kExitInternal;
  }
  return code;
}
