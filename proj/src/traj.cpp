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

#include "stochgrasp/traj.hpp"

#include <algorithm>
#include <chrono>

#include "stochgrasp/rng.hpp"

namespace stochgrasp {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ControlInput static_control(const Stance& stance, const Eigen::VectorXd& forces) {
  ControlInput u;
  int c = 0;
  for (int i = 0; i < kNumBooms; ++i) {
    if (stance.anchor_ids[i]) u.boom_forces[i] = forces(c++);
  }
  return u;
}

}  // namespace

Trajectory seed_body_trajectory(const TrajState& start, const TrajState& goal,
                                const Stance& stance, const Environment& env,
                                const RobotModel& robot, const PlannerConfig& planner,
                                const ScpConfig& scp, std::uint64_t stream) {
  if (!stance.is_four()) throw ContractError("body seed needs a 4-stance");
  const int n = scp.N;
  Rng rng(derive_seed(planner.rng_seed, 0xb0d1ULL, stream));
  const Vec3 a = start.pose.vec();
  Vec3 b = goal.pose.vec();
  b.z() = a.z() + wrap_angle(b.z() - a.z());

  Trajectory t;
  t.phase = Phase::body;
  t.stance = stance;
  t.dt = scp.dt;
  std::vector<Pose> poses(n);
  for (int k = 0; k < n; ++k) {
    // Smoothstep timing over steps 1..n-2 with the first and last step
    // held, so that forward-difference velocities are zero where the
    // state is at rest and Euler integration reproduces the positions.
    const double u = n > 3 ? std::clamp((k - 1.0) / (n - 3.0), 0.0, 1.0) : (k > 0 ? 1.0 : 0.0);
    const double tau = u * u * (3.0 - 2.0 * u);
    Vec3 v = (1.0 - tau) * a + tau * b;
    if (k >= n - 2) v = b;
    Pose p{v.x(), v.y(), v.z()};
    FeasibilityReport rep = pose_feasible(p, stance, Wrench::Zero(), robot, env, planner);
    if (!rep.feasible) {
      if (k == 0 || k == n - 1) {
        throw SeedFailure("body seed: endpoint " + std::to_string(k) + " is not feasible", k);
      }
      double best = std::numeric_limits<double>::infinity();
      std::optional<Pose> pick;
      for (int s = 0; s < planner.seed_samples; ++s) {
        Vec3 d(rng.normal() * planner.perturbation_std(0), rng.normal() * planner.perturbation_std(1),
               rng.normal() * planner.perturbation_std(2));
        const Pose cand{p.x + d.x(), p.y + d.y(), p.phi + d.z()};
        const double dist = d.norm();
        if (dist >= best) continue;
        if (pose_feasible(cand, stance, Wrench::Zero(), robot, env, planner).feasible) {
          best = dist;
          pick = cand;
        }
      }
      if (!pick) {
        throw SeedFailure("body seed: waypoint " + std::to_string(k) + " cannot be repaired", k);
      }
      p = *pick;
    }
    poses[k] = p;
  }

  for (int k = 0; k < n; ++k) {
    TrajState s = TrajState::at_rest(poses[k]);
    if (k > 0 && k < n - 1) {
      s.xdot = (poses[k + 1].x - poses[k].x) / t.dt;
      s.ydot = (poses[k + 1].y - poses[k].y) / t.dt;
      s.phidot = (poses[k + 1].phi - poses[k].phi) / t.dt;
    }
    const auto alloc = allocate_forces(poses[k], stance, Wrench::Zero(), robot, env);
    if (!alloc) throw SeedFailure("body seed: no allocation at waypoint " + std::to_string(k), k);
    t.states.push_back(s);
    t.controls.push_back(static_control(stance, alloc->forces));
  }
  t.min_log_prob = trajectory_min_log_prob(t, env, robot);
  return t;
}

std::vector<Vec2> swing_path(const Anchor& from, const Anchor& to, double apex, int n) {
  const Vec2 chord = to.position - from.position;
  Vec2 side = Vec2::Zero();
  if (chord.norm() > 0.0) {
    side = perp(chord).normalized();
    if (side.dot(from.normal + to.normal) < 0.0) side = -side;
  }
  std::vector<Vec2> out(n);
  for (int k = 0; k < n; ++k) {
    const double tau = n > 1 ? static_cast<double>(k) / (n - 1) : 0.0;
    out[k] = from.position + tau * chord + 4.0 * apex * tau * (1.0 - tau) * side;
  }
  out.front() = from.position;
  out.back() = to.position;
  return out;
}

Trajectory seed_ee_trajectory(const Pose& hold, const Stance& stance3, const Anchor& from,
                              const Anchor& to, const Environment& env, const RobotModel& robot,
                              const PlannerConfig& planner, const ScpConfig& scp) {
  const auto slot = stance3.free_slot();
  if (!slot) throw ContractError("end-effector seed needs a 3-stance");
  const int n = scp.N;
  const Vec2 shoulder = robot.shoulder_world(hold, *slot);

  std::optional<std::vector<Vec2>> path;
  for (double apex : kSwingApexOffsets) {
    auto cand = swing_path(from, to, apex, n);
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      const double len = (cand[k] - shoulder).norm();
      ok = len >= robot.b_min && len <= robot.b_max &&
           !segment_intersects_walls(shoulder, cand[k], env);
      // Interior points must be off the rock; a degenerate swing stays on
      // its anchor.
      if (ok && k > 0 && k < n - 1 && cand[k] != from.position) {
        ok = point_in_free_space(cand[k], env);
      }
      if (ok && k > 0) ok = !segment_intersects_walls(cand[k - 1], cand[k], env);
    }
    if (ok) {
      path = std::move(cand);
      break;
    }
  }
  if (!path) throw SeedFailure("end-effector seed: no collision-free swing", 0);

  Trajectory t;
  t.phase = Phase::end_effector;
  t.stance = stance3;
  t.dt = scp.dt;
  t.free_end_path = *path;
  for (int k = 0; k < n; ++k) {
    const Vec2& e = (*path)[k];
    const Wrench ext = cantilever_wrench(hold, robot, e, env.gravity);
    const auto alloc = allocate_forces(hold, stance3, ext, robot, env);
    if (!alloc || !(alloc->robustness >= planner.r_min)) {
      throw SeedFailure("end-effector seed: step " + std::to_string(k) + " cannot be held", k);
    }
    const FreeBoomHold h = free_boom_hold(hold, robot, *slot, e, env.gravity);
    if (std::abs(h.torque) > robot.t_max || std::abs(h.force) > robot.f_max) {
      throw SeedFailure("end-effector seed: shoulder load exceeds limits at step " +
                            std::to_string(k),
                        k);
    }
    ControlInput u = static_control(stance3, alloc->forces);
    u.free_boom_force = h.force;
    u.free_boom_torque = h.torque;
    t.states.push_back(TrajState::at_rest(hold));
    t.controls.push_back(u);
  }
  t.min_log_prob = trajectory_min_log_prob(t, env, robot);
  return t;
}

ScpResult optimize_phase(const Trajectory& seed, const Environment& env, const RobotModel& robot,
                         const ScpConfig& scp, const PlannerConfig& planner) {
  // No step may end up more than 1e-9 less likely to succeed than the
  // seed's least likely step.
  const double p_seed = std::exp(trajectory_min_log_prob(seed, env, robot));
  const double floor = p_seed > 1e-9 ? std::log(p_seed - 1e-9) : kNegInf;
  return scp_optimize(seed, env, robot, scp, planner, floor);
}

std::vector<GraspConfiguration> PlanResult::configurations(const Environment& env,
                                                           const RobotModel& robot) const {
  std::vector<GraspConfiguration> out;
  for (const auto& ph : phases) {
    const auto c = trajectory_configurations(ph.optimized);
    out.insert(out.end(), c.begin(), c.end());
  }
  if (!plan.transition_witness_poses.empty()) {
    GraspConfiguration last;
    last.pose = plan.transition_witness_poses.back();
    last.anchor_ids = plan.stances.back().anchor_ids;
    const auto alloc = allocate_forces(last.pose, plan.stances.back(), Wrench::Zero(), robot, env);
    int c = 0;
    for (int i = 0; i < kNumBooms; ++i) {
      last.forces[i] = alloc ? alloc->forces(c++) : std::numeric_limits<double>::infinity();
    }
    out.push_back(last);
  } else {
    GraspConfiguration only;
    only.pose = plan.start_pose;
    only.anchor_ids = plan.stances.front().anchor_ids;
    const auto alloc = allocate_forces(only.pose, plan.stances.front(), Wrench::Zero(), robot, env);
    int c = 0;
    for (int i = 0; i < kNumBooms; ++i) {
      only.forces[i] = alloc ? alloc->forces(c++) : std::numeric_limits<double>::infinity();
    }
    out.push_back(only);
  }
  return out;
}

PlanResult plan_full(const FootstepPlan& plan, const Environment& env, const RobotModel& robot,
                     const ScpConfig& scp, const PlannerConfig& planner) {
  plan.validate();
  PlanResult res;
  res.plan = plan;
  TrajState cur = TrajState::at_rest(plan.start_pose);
  for (int i = 0; i < plan.transitions(); ++i) {
    const Stance& from = plan.stances[i];
    const Stance& to = plan.stances[i + 1];
    const int slot = plan.moving_boom_indices[i];
    const Pose& w = plan.transition_witness_poses[i];
    try {
      PhaseRecord body;
      body.phase = Phase::body;
      body.transition = i;
      auto t0 = Clock::now();
      body.seed = seed_body_trajectory(cur, TrajState::at_rest(w), from, env, robot, planner, scp,
                                       static_cast<std::uint64_t>(i));
      body.seed_seconds = seconds_since(t0);
      t0 = Clock::now();
      ScpResult sr = optimize_phase(body.seed, env, robot, scp, planner);
      body.scp_seconds = seconds_since(t0);
      body.optimized = std::move(sr.trajectory);
      body.log = std::move(sr.log);
      body.degraded = sr.degraded;
      body.degraded_reason = sr.degraded_reason;
      res.phases.push_back(std::move(body));

      PhaseRecord ee;
      ee.phase = Phase::end_effector;
      ee.transition = i;
      t0 = Clock::now();
      ee.seed = seed_ee_trajectory(w, from.without(slot), env.anchor(*from.anchor_ids[slot]),
                                   env.anchor(*to.anchor_ids[slot]), env, robot, planner, scp);
      ee.seed_seconds = seconds_since(t0);
      t0 = Clock::now();
      sr = optimize_phase(ee.seed, env, robot, scp, planner);
      ee.scp_seconds = seconds_since(t0);
      ee.optimized = std::move(sr.trajectory);
      ee.log = std::move(sr.log);
      ee.degraded = sr.degraded;
      ee.degraded_reason = sr.degraded_reason;
      res.phases.push_back(std::move(ee));
    } catch (const SeedFailure& e) {
      res.failed_transition = i;
      res.failure = e.what();
      return res;
    }
    cur = TrajState::at_rest(w);
  }
  res.complete = true;
  res.success_log_prob = plan_success_log_prob(res.configurations(env, robot), env, robot);
  return res;
}

}  // namespace stochgrasp
