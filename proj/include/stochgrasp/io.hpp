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

// Structured-text (JSON) and CSV readers and writers for every artifact the
// toolkit exchanges. Readers throw ParseError carrying the 1-based line of
// the offending input when it is known, 0 otherwise.

#ifndef STOCHGRASP_IO_HPP_
#define STOCHGRASP_IO_HPP_

#include <span>
#include <string>
#include <vector>

#include "stochgrasp/eval.hpp"

namespace stochgrasp {

inline constexpr int kFileFormatVersion = 1;

// Throws ConfigError naming the path when it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string environment_to_json(const Environment& env);
// Validates the result; invariant breaches surface as ConfigError.
Environment environment_from_json(const std::string& text);

// Config readers start from the defaults, so a file only lists overrides.
std::string envgen_to_json(const EnvGenConfig& config);
EnvGenConfig envgen_from_json(const std::string& text);
std::string robot_to_json(const RobotModel& robot);
RobotModel robot_from_json(const std::string& text);
std::string planner_to_json(const PlannerConfig& config);
PlannerConfig planner_from_json(const std::string& text);
std::string scp_to_json(const ScpConfig& config);
ScpConfig scp_from_json(const std::string& text);

// Includes the per-episode success probabilities at the witness poses.
std::string footstep_plan_to_json(const FootstepPlan& plan, const Environment& env,
                                  const RobotModel& robot);
FootstepPlan footstep_plan_from_json(const std::string& text);

// States, controls and, per step, each grasp's psi, tension and success
// probability as evaluated at write time.
std::string trajectory_to_json(const Trajectory& traj, const Environment& env,
                               const RobotModel& robot);
Trajectory trajectory_from_json(const std::string& text);

// The per-step probability columns stored in a trajectory file, read
// without re-evaluation: rows are steps, entries NaN for detached slots.
struct StoredTrajectoryColumns {
  std::vector<std::array<double, kNumBooms>> force;
  std::vector<std::array<double, kNumBooms>> probability;
  std::vector<double> step_probability;
};
StoredTrajectoryColumns trajectory_columns_from_json(const std::string& text);

// One row per step: k, state, controls, then psi/force/probability per slot
// and the joint step probability. Empty cells for detached slots.
std::string trajectory_csv(const Trajectory& traj, const Environment& env,
                           const RobotModel& robot);

std::string scp_log_csv(std::span<const PhaseRecord> phases);
std::string phase_timings_csv(std::span<const PhaseRecord> phases);
std::string plan_report_json(const PlanResult& result, const Environment& env,
                             const RobotModel& robot);

std::string trials_csv(std::span<const TrialRecord> records);
std::string histogram_csv(const Histogram& histogram);
std::string timings_csv(std::span<const TimingSummary> timings);

// Header "time,f1..f4,a1..a4". Throws ParseError with the line number on a
// malformed row.
std::vector<ForceLogEntry> parse_force_log_csv(const std::string& text);
std::string force_log_csv(std::span<const ForceLogEntry> log);
std::string force_log_analysis_csv(const ForceLogAnalysis& analysis);

// "%.12g", locale independent.
std::string format_number(double v);

}  // namespace stochgrasp

#endif  // STOCHGRASP_IO_HPP_
