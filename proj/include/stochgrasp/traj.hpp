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

// Seed trajectories for body and end-effector moves, their SCP refinement,
// and execution of a whole footstep plan as alternating phases.

#ifndef STOCHGRASP_TRAJ_HPP_
#define STOCHGRASP_TRAJ_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochgrasp/scp.hpp"

namespace stochgrasp {

// Straight-line body move in a 4-stance on a smoothstep time profile that
// holds the first and last step. Waypoints that fail pose_feasible are
// replaced by the nearest feasible Gaussian perturbation; controls are
// static allocations, velocities forward differences with both ends at
// rest. `stream` selects the perturbation stream. Throws SeedFailure naming
// the waypoint when one cannot be repaired.
Trajectory seed_body_trajectory(const TrajState& start, const TrajState& goal,
                                const Stance& stance, const Environment& env,
                                const RobotModel& robot, const PlannerConfig& planner,
                                const ScpConfig& scp, std::uint64_t stream = 0);

// Apex offsets tried, in order, for the swing parabola.
inline constexpr double kSwingApexOffsets[] = {0.1, 0.2, 0.4, 0.8};

// Free-end path from `from` to `to` bulging by `apex` into free space.
std::vector<Vec2> swing_path(const Anchor& from, const Anchor& to, double apex, int n);

// Quasi-static swing of the free boom of `stance3` with the body held at
// `hold`. Throws SeedFailure when no apex offset gives a collision-free,
// reachable path or when a step cannot be held.
Trajectory seed_ee_trajectory(const Pose& hold, const Stance& stance3, const Anchor& from,
                              const Anchor& to, const Environment& env, const RobotModel& robot,
                              const PlannerConfig& planner, const ScpConfig& scp);

// SCP refinement holding every step's success probability at or above the
// seed's minimum less 1e-9. A degraded result returns the seed flagged.
ScpResult optimize_phase(const Trajectory& seed, const Environment& env, const RobotModel& robot,
                         const ScpConfig& scp, const PlannerConfig& planner);

struct PhaseRecord {
  Phase phase = Phase::body;
  int transition = 0;
  Trajectory seed;
  Trajectory optimized;
  std::vector<ScpIterate> log;
  double seed_seconds = 0.0;
  double scp_seconds = 0.0;
  bool degraded = false;
  std::string degraded_reason;
};

struct PlanResult {
  FootstepPlan plan;
  std::vector<PhaseRecord> phases;
  bool complete = false;
  std::optional<int> failed_transition;
  std::string failure;
  double success_log_prob = kNegInf;

  // Configurations executed: every phase in order, then the final 4-stance
  // at the last witness pose.
  std::vector<GraspConfiguration> configurations(const Environment& env,
                                                 const RobotModel& robot) const;
};

// Body move to each witness pose followed by the swing to the new anchor.
// A seed failure stops execution and records the failing transition.
PlanResult plan_full(const FootstepPlan& plan, const Environment& env, const RobotModel& robot,
                     const ScpConfig& scp, const PlannerConfig& planner);

}  // namespace stochgrasp

#endif  // STOCHGRASP_TRAJ_HPP_
