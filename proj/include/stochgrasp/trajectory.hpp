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

// Discretized movement phases and their exact per-timestep evaluation.

#ifndef STOCHGRASP_TRAJECTORY_HPP_
#define STOCHGRASP_TRAJECTORY_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stochgrasp/footstep.hpp"

namespace stochgrasp {

enum class Phase { body, end_effector };

const char* to_string(Phase p);

// A body move holds a 4-stance while the body travels; an end-effector move
// holds the body still in a 3-stance while the free gripper follows
// free_end_path from the old to the new anchor.
struct Trajectory {
  Phase phase = Phase::body;
  Stance stance;
  std::vector<TrajState> states;
  std::vector<ControlInput> controls;
  double dt = 0.5;
  std::optional<std::vector<Vec2>> free_end_path;
  double min_log_prob = kNegInf;
  bool degraded = false;

  int size() const { return static_cast<int>(states.size()); }
  // Throws ContractError on length mismatches or a missing/extra free-end
  // path.
  void validate() const;
};

// Load on the body other than gravity and attached tensions at step k.
Wrench step_external(const Trajectory& traj, int k, const RobotModel& robot,
                     const Environment& env);

struct StepGrasps {
  std::array<std::optional<double>, kNumBooms> psi;
  std::array<std::optional<double>, kNumBooms> force;
  std::array<std::optional<double>, kNumBooms> log_prob;
  double robustness = kNegInf;
};

// Exact grasp angles, tensions and success log-probabilities at step k.
StepGrasps evaluate_step(const Trajectory& traj, int k, const Environment& env,
                         const RobotModel& robot);

double trajectory_min_log_prob(const Trajectory& traj, const Environment& env,
                               const RobotModel& robot);

// Mean attached-boom tension over all steps.
double mean_abs_force(const Trajectory& traj);

// ||A(s_k, u_k) - s_{k+1}||_1 for k = 0..N-2.
std::vector<double> dynamics_residuals(const Trajectory& traj, const Environment& env,
                                       const RobotModel& robot);

// The grasp configurations a trajectory passes through, for episode
// aggregation. An end-effector move contributes its three held grasps.
std::vector<GraspConfiguration> trajectory_configurations(const Trajectory& traj);

struct VerifyReport {
  bool ok = true;
  std::string failure;  // first failing check, empty when ok
  double min_log_prob = kNegInf;
  double max_dynamics_residual = 0.0;
};

// Exact re-verification: robustness floor, force/torque boxes, boom length
// and angle boxes, collisions, and the per-step dynamics residual.
VerifyReport verify_trajectory(const Trajectory& traj, const Environment& env,
                               const RobotModel& robot, double r_floor, double resid_tol);

}  // namespace stochgrasp

#endif  // STOCHGRASP_TRAJECTORY_HPP_
