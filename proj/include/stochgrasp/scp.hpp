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

// Sequential convex programming over one movement phase.
//
// Merit (to be minimized):
//
//   kappa * sum_k -r(s_k, u_k)
//     + alpha * sum_k ||A(s_k, u_k) - s_{k+1}||_1
//     + beta * sum_{c in x, y, phi} max_k |c_{k+1} - c_k|
//
// Each iteration solves a QP built around the current trajectory: a
// concave quadratic model of r, linearized dynamics with L1 slacks,
// linearized boom boxes and robustness floor, and trust boxes.

#ifndef STOCHGRASP_SCP_HPP_
#define STOCHGRASP_SCP_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stochgrasp/qp.hpp"
#include "stochgrasp/trajectory.hpp"

namespace stochgrasp {

struct ScpConfig {
  double kappa = 1.0;
  double alpha = 100.0;
  double beta = 1.0;
  Vec3 rho_s = Vec3(0.1, 0.1, 0.1);  // m, m, rad; velocities use rho_s / dt
  double rho_u = 2.0;                // N
  double rho_torque = 0.2;           // N m
  int max_iters = 30;
  double convergence_tol = 1e-4;
  int N = 20;
  double dt = 0.5;
  double resid_tol = 1e-3;
  double radius_floor = 1e-4;
  double qp_tol = 1e-6;
  int qp_max_iters = 20000;

  void validate() const;
};

// Decision-vector layout of a subproblem.
struct SubproblemLayout {
  int N = 0;
  int nu = 0;  // controls per step

  int state(int k, int c) const { return 6 * k + c; }
  int control(int k, int c) const { return 6 * N + nu * k + c; }
  int slack_pos(int k, int c) const { return 6 * N + nu * N + 12 * k + c; }
  int slack_neg(int k, int c) const { return slack_pos(k, c) + 6; }
  int smooth(int c) const { return 6 * N + nu * N + 12 * (N - 1) + c; }
  int size() const { return smooth(3); }
};

struct SubproblemOptions {
  std::optional<double> r_floor;  // defaults to planner r_min
  double trust_scale = 1.0;       // multiplies rho_s, rho_u and rho_torque
};

// Throws GeometryError naming the timestep on degenerate boom geometry.
ConvexSubproblem build_subproblem(const Trajectory& reference, const Environment& env,
                                  const RobotModel& robot, const ScpConfig& scp,
                                  const PlannerConfig& planner,
                                  const SubproblemOptions& options = {},
                                  SubproblemLayout* layout = nullptr);

// Stacks a trajectory into the layout; slacks and epigraph variables take
// their tightest feasible values.
Eigen::VectorXd pack_trajectory(const Trajectory& traj, const Environment& env,
                                const RobotModel& robot);

// Overwrites states and controls of `like` from a decision vector.
Trajectory unpack_trajectory(const Eigen::VectorXd& z, const Trajectory& like);

double true_merit(const Trajectory& traj, const Environment& env, const RobotModel& robot,
                  const ScpConfig& scp);

struct ScpIterate {
  int iter = 0;
  double merit = 0.0;
  double true_min_probability = 0.0;
  double trust_rho_s = 0.0;
  double trust_rho_u = 0.0;
  bool accepted = false;
};

struct ScpResult {
  Trajectory trajectory;
  std::vector<ScpIterate> log;
  bool degraded = false;
  std::string degraded_reason;
};

// Throws ContractError when the seed does not start and end at rest or
// fails its own static checks. Every step of the result keeps exact
// robustness >= max(planner.r_min, r_floor). A final verification failure
// returns the seed with the degraded flag set.
ScpResult scp_optimize(const Trajectory& seed, const Environment& env, const RobotModel& robot,
                       const ScpConfig& scp, const PlannerConfig& planner,
                       std::optional<double> r_floor = std::nullopt);

}  // namespace stochgrasp

#endif  // STOCHGRASP_SCP_HPP_
