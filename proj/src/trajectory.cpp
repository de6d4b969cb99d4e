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

#include "stochgrasp/trajectory.hpp"

#include <algorithm>

namespace stochgrasp {

const char* to_string(Phase p) { return p == Phase::body ? "body" : "end_effector"; }

void Trajectory::validate() const {
  if (states.size() != controls.size() || states.empty()) {
    throw ContractError("trajectory: states and controls must be non-empty and equal length");
  }
  if (!(dt > 0.0)) throw ContractError("trajectory: dt must be positive");
  if (phase == Phase::body) {
    if (!stance.is_four()) throw ContractError("trajectory: body move needs a 4-stance");
    if (free_end_path) throw ContractError("trajectory: body move with a free-end path");
  } else {
    if (!stance.free_slot()) throw ContractError("trajectory: end-effector move needs a 3-stance");
    if (!free_end_path || free_end_path->size() != states.size()) {
      throw ContractError("trajectory: free-end path missing or of wrong length");
    }
  }
}

Wrench step_external(const Trajectory& traj, int k, const RobotModel& robot,
                     const Environment& env) {
  if (traj.phase == Phase::body) return Wrench::Zero();
  return cantilever_wrench(traj.states[k].pose, robot, (*traj.free_end_path)[k], env.gravity);
}

StepGrasps evaluate_step(const Trajectory& traj, int k, const Environment& env,
                         const RobotModel& robot) {
  StepGrasps out;
  const Pose& pose = traj.states[k].pose;
  double r = 0.0;
  for (int i = 0; i < kNumBooms; ++i) {
    if (!traj.stance.anchor_ids[i]) continue;
    const Anchor& a = env.anchor(*traj.stance.anchor_ids[i]);
    const double psi = pull_angle(a, robot.shoulder_world(pose, i));
    const double f = traj.controls[k].boom_forces[i].value_or(0.0);
    out.psi[i] = psi;
    out.force[i] = f;
    out.log_prob[i] = grasp_log_prob(f, psi, a.limit);
    r += *out.log_prob[i];
  }
  out.robustness = r;
  return out;
}

double trajectory_min_log_prob(const Trajectory& traj, const Environment& env,
                               const RobotModel& robot) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < traj.size(); ++k) m = std::min(m, evaluate_step(traj, k, env, robot).robustness);
  return m;
}

double mean_abs_force(const Trajectory& traj) {
  double sum = 0.0;
  int n = 0;
  for (const auto& u : traj.controls) {
    for (const auto& f : u.boom_forces) {
      if (!f) continue;
      sum += std::abs(*f);
      ++n;
    }
  }
  return n > 0 ? sum / n : 0.0;
}

std::vector<double> dynamics_residuals(const Trajectory& traj, const Environment& env,
                                       const RobotModel& robot) {
  const AnchorSlots slots = traj.stance.resolve(env);
  std::vector<double> out;
  for (int k = 0; k + 1 < traj.size(); ++k) {
    const TrajState next = dynamics_step(traj.states[k], traj.controls[k], traj.dt, robot, slots,
                                         env.gravity, step_external(traj, k, robot, env));
    out.push_back((next.vec() - traj.states[k + 1].vec()).lpNorm<1>());
  }
  return out;
}

std::vector<GraspConfiguration> trajectory_configurations(const Trajectory& traj) {
  std::vector<GraspConfiguration> out;
  for (int k = 0; k < traj.size(); ++k) {
    GraspConfiguration c;
    c.pose = traj.states[k].pose;
    c.anchor_ids = traj.stance.anchor_ids;
    for (int i = 0; i < kNumBooms; ++i) c.forces[i] = traj.controls[k].boom_forces[i].value_or(0.0);
    out.push_back(c);
  }
  return out;
}

VerifyReport verify_trajectory(const Trajectory& traj, const Environment& env,
                               const RobotModel& robot, double r_floor, double resid_tol) {
  traj.validate();
  VerifyReport rep;
  auto fail = [&](const std::string& why, int k) {
    if (rep.ok) {
      rep.ok = false;
      rep.failure = why + " at step " + std::to_string(k);
    }
  };
  const AnchorSlots slots = traj.stance.resolve(env);
  const double ftol = 1e-9;
  rep.min_log_prob = std::numeric_limits<double>::infinity();
  for (int k = 0; k < traj.size(); ++k) {
    const Pose& pose = traj.states[k].pose;
    const ControlInput& u = traj.controls[k];
    const StepGrasps g = evaluate_step(traj, k, env, robot);
    rep.min_log_prob = std::min(rep.min_log_prob, g.robustness);
    if (!(g.robustness >= r_floor)) fail("robustness below floor", k);
    StanceGeometry geo;
    try {
      geo = boom_geometry(pose, robot, slots);
    } catch (const GeometryError&) {
      fail("degenerate boom geometry", k);
      continue;
    }
    for (int i = 0; i < kNumBooms; ++i) {
      if (!slots[i]) continue;
      if (!u.boom_forces[i]) {
        fail("missing tension", k);
        continue;
      }
      const double f = *u.boom_forces[i];
      if (f < robot.f_min - ftol || f > robot.f_max + ftol) fail("tension out of bounds", k);
      if (geo[i]->length < robot.b_min || geo[i]->length > robot.b_max) fail("boom length", k);
      if (std::abs(geo[i]->theta) > robot.theta_max) fail("shoulder angle", k);
      if (segment_intersects_walls(geo[i]->shoulder_world, slots[i]->position, env)) {
        fail("boom collision", k);
      }
    }
    if (body_collides(pose, robot, env)) fail("body collision", k);
    if (traj.phase == Phase::end_effector) {
      const int j = *traj.stance.free_slot();
      const Vec2 shoulder = robot.shoulder_world(pose, j);
      const Vec2 end = (*traj.free_end_path)[k];
      const double len = (end - shoulder).norm();
      if (len < robot.b_min || len > robot.b_max) fail("free boom length", k);
      if (segment_intersects_walls(shoulder, end, env)) fail("free boom collision", k);
      if (u.free_boom_force && std::abs(*u.free_boom_force) > robot.f_max + ftol) {
        fail("free boom force", k);
      }
      if (u.free_boom_torque && std::abs(*u.free_boom_torque) > robot.t_max + ftol) {
        fail("free boom torque", k);
      }
    }
  }
  const auto res = dynamics_residuals(traj, env, robot);
  for (std::size_t k = 0; k < res.size(); ++k) {
    rep.max_dynamics_residual = std::max(rep.max_dynamics_residual, res[k]);
    if (res[k] > resid_tol) fail("dynamics residual", static_cast<int>(k));
  }
  return rep;
}

}  // namespace stochgrasp
