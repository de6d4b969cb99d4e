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

// Monte Carlo validation of plan success probabilities, randomized planner
// comparisons and force-log replay.

#ifndef STOCHGRASP_EVAL_HPP_
#define STOCHGRASP_EVAL_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochgrasp/traj.hpp"

namespace stochgrasp {

inline constexpr int kMinMonteCarloSamples = 100;

struct McEstimate {
  double rate = 0.0;
  double std_error = 0.0;
};

// Each sample draws one standard-normal quantile per grasp episode; the
// episode's limit at step t is mu_t + sigma_t * z. A sample succeeds when
// no applied force exceeds its limit. Out-of-surface episodes always fail.
// Throws std::invalid_argument when n_samples < kMinMonteCarloSamples.
McEstimate monte_carlo_success(std::span<const GraspConfiguration> configs,
                               const Environment& env, const RobotModel& robot, int n_samples,
                               std::uint64_t seed);
// Throws ContractError unless result.complete.
McEstimate monte_carlo_success(const PlanResult& result, const Environment& env,
                               const RobotModel& robot, int n_samples, std::uint64_t seed);

enum class PlannerKind { rbp, naive };
const char* to_string(PlannerKind k);

struct TrialRecord {
  int trial = 0;
  std::uint64_t env_seed = 0;
  PlannerKind planner = PlannerKind::rbp;
  bool plan_found = false;
  int transitions = 0;
  int degraded_phases = 0;
  double analytic_log_prob = kNegInf;
  double mc_success_rate = 0.0;
  double mc_std_error = 0.0;
  int mc_samples = 0;
  std::map<std::string, double> timings;  // phase -> seconds
  std::string note;
};

struct TrialConfig {
  EnvGenConfig envgen;
  RobotModel robot;
  PlannerConfig planner;
  ScpConfig scp;
  int mc_samples = 10000;
  int threads = 0;  // 0: STOCHGRASP_THREADS, else hardware concurrency
};

// Start target and goal of a generated corridor: 0.8 m in from either end,
// at mid height.
std::pair<Vec2, Vec2> corridor_endpoints(const Environment& env);

// Called once per trial with the full RBP result; from any worker thread.
using TrialObserver =
    std::function<void(int trial, const Environment& env, const PlanResult* rbp)>;

// Runs both planners on n_trials generated corridors. Environment i uses
// seed derive_seed(master, 1, i). Records come back ordered by (trial,
// planner) regardless of thread count; a failing trial is recorded, never
// thrown.
std::vector<TrialRecord> run_trials(int n_trials, const TrialConfig& config,
                                    std::uint64_t master_seed,
                                    const TrialObserver& observer = {});

// Both planners on one given environment, recorded as trial `trial`.
std::vector<TrialRecord> run_environment_trial(int trial, const Environment& env,
                                               const TrialConfig& config,
                                               std::uint64_t master_seed,
                                               const TrialObserver& observer = {});

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges over [0, 1]
  std::map<PlannerKind, std::vector<int>> counts;
};

// Success probability histogram over found plans per planner.
Histogram success_histogram(std::span<const TrialRecord> records, int bins = 10);

struct TimingSummary {
  std::string phase;
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

// Mean and standard deviation per timing key over found plans.
std::vector<TimingSummary> timing_summary(std::span<const TrialRecord> records);

// Median analytic success probability over found plans of one planner;
// NaN when there are none.
double median_success(std::span<const TrialRecord> records, PlannerKind planner);

int resolve_thread_count(int requested);

// One sample of a force log: per-anchor tension (N) and the world-frame
// direction of the pull, anchor toward robot (rad).
struct ForceLogEntry {
  double time = 0.0;
  std::array<double, kNumBooms> force{};
  std::array<double, kNumBooms> angle{};
};

struct ForceLogAnalysis {
  std::vector<double> time;
  std::vector<std::array<double, kNumBooms>> psi;
  std::vector<std::array<double, kNumBooms>> probability;
  std::vector<std::array<bool, kNumBooms>> out_of_surface;
};

// Per-entry grasp success probability for each anchor. Throws
// std::invalid_argument unless timestamps strictly increase.
ForceLogAnalysis analyze_force_log(std::span<const ForceLogEntry> log,
                                   const std::array<Anchor, kNumBooms>& anchors);

}  // namespace stochgrasp

#endif  // STOCHGRASP_EVAL_HPP_
