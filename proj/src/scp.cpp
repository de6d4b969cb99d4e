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

#include "stochgrasp/scp.hpp"

#include <algorithm>

namespace stochgrasp {

using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

void ScpConfig::validate() const {
  if (kappa < 0.0 || alpha < 0.0 || beta < 0.0) throw ConfigError("scp: weights must be >= 0");
  if ((rho_s.array() <= 0.0).any() || !(rho_u > 0.0) || !(rho_torque > 0.0)) {
    throw ConfigError("scp: trust radii must be positive");
  }
  if (N < 2) throw ConfigError("scp: N must be at least 2");
  if (!(dt > 0.0)) throw ConfigError("scp: dt must be positive");
  if (max_iters < 0 || qp_max_iters <= 0) throw ConfigError("scp: iteration limits");
  if (!(convergence_tol > 0.0 && resid_tol > 0.0 && radius_floor > 0.0 && qp_tol > 0.0)) {
    throw ConfigError("scp: tolerances must be positive");
  }
}

namespace {

int control_size(const Trajectory& t) { return static_cast<int>(t.controls.front().vec().size()); }

// Index of the first free-boom entry in a control vector, or -1.
int free_offset(const Trajectory& t) {
  if (t.phase == Phase::body) return -1;
  return t.controls.front().attached_count();
}

struct Rows {
  std::vector<Triplet> trips;
  std::vector<double> lo, hi;

  int add(double l, double u) {
    lo.push_back(l);
    hi.push_back(u);
    return static_cast<int>(lo.size()) - 1;
  }
};

double max_abs_step(const Trajectory& t, int c) {
  double m = 0.0;
  for (int k = 0; k + 1 < t.size(); ++k) {
    m = std::max(m, std::abs(t.states[k + 1].vec()(c) - t.states[k].vec()(c)));
  }
  return m;
}

}  // namespace

VectorXd pack_trajectory(const Trajectory& traj, const Environment& env,
                         const RobotModel& robot) {
  SubproblemLayout lay{traj.size(), control_size(traj)};
  VectorXd z = VectorXd::Zero(lay.size());
  const AnchorSlots slots = traj.stance.resolve(env);
  for (int k = 0; k < lay.N; ++k) {
    z.segment<6>(lay.state(k, 0)) = traj.states[k].vec();
    z.segment(lay.control(k, 0), lay.nu) = traj.controls[k].vec();
  }
  for (int k = 0; k + 1 < lay.N; ++k) {
    const TrajState next = dynamics_step(traj.states[k], traj.controls[k], traj.dt, robot, slots,
                                         env.gravity, step_external(traj, k, robot, env));
    const StateVec r = next.vec() - traj.states[k + 1].vec();
    for (int c = 0; c < 6; ++c) {
      z(lay.slack_pos(k, c)) = std::max(r(c), 0.0);
      z(lay.slack_neg(k, c)) = std::max(-r(c), 0.0);
    }
  }
  for (int c = 0; c < 3; ++c) z(lay.smooth(c)) = max_abs_step(traj, c);
  return z;
}

Trajectory unpack_trajectory(const VectorXd& z, const Trajectory& like) {
  SubproblemLayout lay{like.size(), control_size(like)};
  Trajectory t = like;
  for (int k = 0; k < lay.N; ++k) {
    t.states[k] = TrajState::from_vec(z.segment<6>(lay.state(k, 0)));
    t.controls[k].set_from_vec(z.segment(lay.control(k, 0), lay.nu));
  }
  return t;
}

double true_merit(const Trajectory& traj, const Environment& env, const RobotModel& robot,
                  const ScpConfig& scp) {
  double m = 0.0;
  for (int k = 0; k < traj.size(); ++k) {
    const double r = evaluate_step(traj, k, env, robot).robustness;
    if (r == kNegInf) return std::numeric_limits<double>::infinity();
    m -= scp.kappa * r;
  }
  for (double r : dynamics_residuals(traj, env, robot)) m += scp.alpha * r;
  for (int c = 0; c < 3; ++c) m += scp.beta * max_abs_step(traj, c);
  return m;
}

ConvexSubproblem build_subproblem(const Trajectory& ref, const Environment& env,
                                  const RobotModel& robot, const ScpConfig& scp,
                                  const PlannerConfig& planner, const SubproblemOptions& opt,
                                  SubproblemLayout* layout_out) {
  ref.validate();
  const int N = ref.size();
  const int nu = control_size(ref);
  const SubproblemLayout lay{N, nu};
  if (layout_out) *layout_out = lay;
  const int n = lay.size();
  const AnchorSlots slots = ref.stance.resolve(env);
  const bool ee = ref.phase == Phase::end_effector;
  const int free0 = free_offset(ref);
  const double r_floor = opt.r_floor.value_or(planner.r_min);
  const double ts = opt.trust_scale;
  const double inf = kQpInfinity;

  std::vector<Triplet> ptrips;
  VectorXd q = VectorXd::Zero(n);
  double c0 = 0.0;
  Rows rows;

  for (int k = 0; k < N; ++k) {
    const TrajState& s = ref.states[k];
    const ControlInput& u = ref.controls[k];
    const VectorXd uv = u.vec();
    const Vec3 p = s.pose.vec();

    // Concave model of r: exact gradient, diagonal curvature clamped to
    // the concave side.
    double r_hat = 0.0;
    Eigen::RowVector3d g_pose = Eigen::RowVector3d::Zero();
    Eigen::Matrix3d c_pose = Eigen::Matrix3d::Zero();
    std::vector<std::pair<int, double>> g_force;  // (control index, d r / d f)
    int col = 0;
    for (int i = 0; i < kNumBooms; ++i) {
      if (!slots[i]) continue;
      StanceGeometry geo;
      BoomGeometryJacobian jac;
      try {
        geo = boom_geometry(s.pose, robot, slots);
        jac = boom_geometry_jacobian(s.pose, robot, i, *slots[i]);
      } catch (const GeometryError& e) {
        throw GeometryError("timestep " + std::to_string(k) + ": " + e.what());
      }
      const double f = uv(col);
      const GraspTerm gt = grasp_term(f, geo[i]->psi, slots[i]->limit);
      if (gt.out_of_surface) {
        throw GeometryError("timestep " + std::to_string(k) + ": grasp " + std::to_string(i) +
                            " pulled outside its limit surface");
      }
      r_hat += gt.value;
      g_pose += gt.d_psi * jac.d_psi;
      c_pose += std::max(0.0, -gt.d_psipsi) * jac.d_psi.transpose() * jac.d_psi;
      const double cf = std::max(0.0, -gt.d_ff);
      const int idx = lay.control(k, col);
      ptrips.emplace_back(idx, idx, scp.kappa * cf);
      q(idx) += scp.kappa * (-gt.d_f - cf * f);
      c0 += scp.kappa * (0.5 * cf * f * f + gt.d_f * f);
      g_force.emplace_back(idx, gt.d_f);

      // Linearized boom boxes (the body is pinned in an end-effector move).
      if (!ee) {
        const double b_hat = geo[i]->length;
        const double th_hat = geo[i]->theta;
        const int rb = rows.add(robot.b_min - b_hat + jac.d_length.dot(p),
                                robot.b_max - b_hat + jac.d_length.dot(p));
        const int rt = rows.add(-robot.theta_max - th_hat + jac.d_theta.dot(p),
                                robot.theta_max - th_hat + jac.d_theta.dot(p));
        for (int c = 0; c < 3; ++c) {
          rows.trips.emplace_back(rb, lay.state(k, c), jac.d_length(c));
          rows.trips.emplace_back(rt, lay.state(k, c), jac.d_theta(c));
        }
      }
      ++col;
    }
    for (int a = 0; a < 3; ++a) {
      const int ia = lay.state(k, a);
      q(ia) += scp.kappa * (-g_pose(a) - (c_pose.row(a) * p)(0));
      for (int b = 0; b < 3; ++b) ptrips.emplace_back(ia, lay.state(k, b), scp.kappa * c_pose(a, b));
    }
    c0 += scp.kappa * (-r_hat + g_pose.dot(p) + 0.5 * p.dot(c_pose * p));

    // Linearized robustness floor.
    {
      double rhs = r_floor - r_hat + g_pose.dot(p);
      for (const auto& [idx, g] : g_force) rhs += g * uv(idx - lay.control(k, 0));
      const int row = rows.add(rhs, inf);
      for (int c = 0; c < 3; ++c) rows.trips.emplace_back(row, lay.state(k, c), g_pose(c));
      for (const auto& [idx, g] : g_force) rows.trips.emplace_back(row, idx, g);
    }

    // State boxes: boundary states fixed, interior in the trust box; an
    // end-effector move pins the body throughout.
    for (int c = 0; c < 6; ++c) {
      const double v = s.vec()(c);
      const double rad = (c < 3 ? scp.rho_s(c) : scp.rho_s(c - 3) / ref.dt) * ts;
      const bool fixed = ee || k == 0 || k == N - 1;
      const int row = rows.add(fixed ? v : v - rad, fixed ? v : v + rad);
      rows.trips.emplace_back(row, lay.state(k, c), 1.0);
    }
    // Control boxes intersected with the trust box; free-boom loads are
    // pinned to their hold values.
    for (int c = 0; c < nu; ++c) {
      double lo, hi;
      if (free0 >= 0 && c >= free0) {
        lo = hi = uv(c);
      } else {
        lo = std::max(robot.f_min, uv(c) - scp.rho_u * ts);
        hi = std::min(robot.f_max, uv(c) + scp.rho_u * ts);
        if (lo > hi) lo = hi = std::clamp(uv(c), robot.f_min, robot.f_max);
      }
      const int row = rows.add(lo, hi);
      rows.trips.emplace_back(row, lay.control(k, c), 1.0);
    }
  }

  // Linearized dynamics with L1 slacks.
  for (int k = 0; k + 1 < N; ++k) {
    const TrajState& s = ref.states[k];
    const ControlInput& u = ref.controls[k];
    const Wrench ext = step_external(ref, k, robot, env);
    DynamicsJacobians jac;
    TrajState next;
    try {
      jac = dynamics_jacobians(s, u, ref.dt, robot, slots, env.gravity, ext);
      next = dynamics_step(s, u, ref.dt, robot, slots, env.gravity, ext);
    } catch (const GeometryError& e) {
      throw GeometryError("timestep " + std::to_string(k) + ": " + e.what());
    }
    const StateVec affine =
        jac.d_state * s.vec() + jac.d_control * u.vec() - next.vec();
    for (int c = 0; c < 6; ++c) {
      const int row = rows.add(affine(c), affine(c));
      for (int j = 0; j < 6; ++j) {
        if (jac.d_state(c, j) != 0.0) rows.trips.emplace_back(row, lay.state(k, j), jac.d_state(c, j));
      }
      for (int j = 0; j < nu; ++j) {
        if (jac.d_control(c, j) != 0.0) {
          rows.trips.emplace_back(row, lay.control(k, j), jac.d_control(c, j));
        }
      }
      rows.trips.emplace_back(row, lay.state(k + 1, c), -1.0);
      rows.trips.emplace_back(row, lay.slack_pos(k, c), -1.0);
      rows.trips.emplace_back(row, lay.slack_neg(k, c), 1.0);
      q(lay.slack_pos(k, c)) += scp.alpha;
      q(lay.slack_neg(k, c)) += scp.alpha;
      const int rp = rows.add(0.0, inf);
      rows.trips.emplace_back(rp, lay.slack_pos(k, c), 1.0);
      const int rn = rows.add(0.0, inf);
      rows.trips.emplace_back(rn, lay.slack_neg(k, c), 1.0);
    }
  }

  // Smoothness epigraph: |c_{k+1} - c_k| <= t_c.
  for (int c = 0; c < 3; ++c) {
    q(lay.smooth(c)) += scp.beta;
    const int r0 = rows.add(0.0, inf);
    rows.trips.emplace_back(r0, lay.smooth(c), 1.0);
    for (int k = 0; k + 1 < N; ++k) {
      const int up = rows.add(-inf, 0.0);
      rows.trips.emplace_back(up, lay.state(k + 1, c), 1.0);
      rows.trips.emplace_back(up, lay.state(k, c), -1.0);
      rows.trips.emplace_back(up, lay.smooth(c), -1.0);
      const int dn = rows.add(0.0, inf);
      rows.trips.emplace_back(dn, lay.state(k + 1, c), 1.0);
      rows.trips.emplace_back(dn, lay.state(k, c), -1.0);
      rows.trips.emplace_back(dn, lay.smooth(c), 1.0);
    }
  }

  ConvexSubproblem p;
  p.P.resize(n, n);
  p.P.setFromTriplets(ptrips.begin(), ptrips.end());
  p.P.prune(0.0);
  p.q = q;
  p.c = c0;
  const int m = static_cast<int>(rows.lo.size());
  p.A.resize(m, n);
  p.A.setFromTriplets(rows.trips.begin(), rows.trips.end());
  p.l = Eigen::Map<VectorXd>(rows.lo.data(), m);
  p.u = Eigen::Map<VectorXd>(rows.hi.data(), m);
  return p;
}

namespace {

// Exact checks on a candidate iterate, excluding the dynamics residual
// which the merit penalizes.
bool candidate_ok(const Trajectory& t, const Environment& env, const RobotModel& robot,
                  double r_floor) {
  const VerifyReport rep =
      verify_trajectory(t, env, robot, r_floor, std::numeric_limits<double>::infinity());
  return rep.ok;
}

double min_probability(const Trajectory& t, const Environment& env, const RobotModel& robot) {
  return std::exp(trajectory_min_log_prob(t, env, robot));
}

}  // namespace

ScpResult scp_optimize(const Trajectory& seed, const Environment& env, const RobotModel& robot,
                       const ScpConfig& scp, const PlannerConfig& planner,
                       std::optional<double> floor) {
  scp.validate();
  seed.validate();
  const auto at_rest = [](const TrajState& s) {
    return std::abs(s.xdot) <= 1e-9 && std::abs(s.ydot) <= 1e-9 && std::abs(s.phidot) <= 1e-9;
  };
  if (!at_rest(seed.states.front()) || !at_rest(seed.states.back())) {
    throw ContractError("scp: seed must start and end at rest");
  }
  const double seed_min = trajectory_min_log_prob(seed, env, robot);
  if (!(seed_min >= planner.r_min)) {
    throw ContractError("scp: seed violates the robustness floor");
  }
  const double r_floor = std::max(planner.r_min, floor.value_or(planner.r_min));
  if (!(seed_min >= r_floor)) throw ContractError("scp: seed violates the requested floor");

  ScpResult res;
  Trajectory cur = seed;
  double cur_merit = true_merit(cur, env, robot, scp);
  double scale = 1.0;
  res.log.push_back({0, cur_merit, min_probability(cur, env, robot), scp.rho_s(0), scp.rho_u, true});

  const double min_rho = std::min(scp.rho_s.minCoeff(), scp.rho_torque);
  std::optional<VectorXd> warm_y;
  for (int it = 1; it <= scp.max_iters; ++it) {
    SubproblemOptions opt;
    opt.r_floor = r_floor;
    opt.trust_scale = scale;
    const ConvexSubproblem sub = build_subproblem(cur, env, robot, scp, planner, opt);
    const QpResult qp =
        solve_qp(sub, scp.qp_tol, scp.qp_max_iters, {}, pack_trajectory(cur, env, robot), warm_y);
    if (qp.status != QpStatus::infeasible) warm_y = qp.y;

    bool accepted = false;
    double improvement = 0.0;
    if (qp.status != QpStatus::infeasible) {
      Trajectory cand = unpack_trajectory(qp.z, cur);
      // Snap quantities the subproblem holds fixed.
      cand.states.front() = cur.states.front();
      cand.states.back() = cur.states.back();
      for (int k = 0; k < cand.size(); ++k) {
        if (cand.phase == Phase::end_effector) {
          cand.states[k] = cur.states[k];
          cand.controls[k].free_boom_force = cur.controls[k].free_boom_force;
          cand.controls[k].free_boom_torque = cur.controls[k].free_boom_torque;
        }
        for (auto& f : cand.controls[k].boom_forces) {
          if (f) f = std::clamp(*f, robot.f_min, robot.f_max);
        }
      }
      if (candidate_ok(cand, env, robot, r_floor)) {
        const double m = true_merit(cand, env, robot, scp);
        if (m <= cur_merit) {
          improvement = cur_merit - m;
          cur = std::move(cand);
          cur_merit = m;
          accepted = true;
        }
      }
    }
    scale = accepted ? std::min(1.0, 1.5 * scale) : 0.5 * scale;
    res.log.push_back({it, cur_merit, min_probability(cur, env, robot), scp.rho_s(0) * scale,
                       scp.rho_u * scale, accepted});
    if (accepted && improvement < scp.convergence_tol) break;
    if (scale * min_rho < scp.radius_floor) break;
  }

  cur.min_log_prob = trajectory_min_log_prob(cur, env, robot);
  const VerifyReport rep = verify_trajectory(cur, env, robot, r_floor, scp.resid_tol);
  if (!rep.ok) {
    res.trajectory = seed;
    res.trajectory.min_log_prob = seed_min;
    res.trajectory.degraded = true;
    res.degraded = true;
    res.degraded_reason = rep.failure;
    return res;
  }
  res.trajectory = std::move(cur);
  return res;
}

}  // namespace stochgrasp
