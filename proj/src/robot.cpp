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

#include "stochgrasp/robot.hpp"

namespace stochgrasp {

void RobotModel::validate() const {
  if (!(b_min > 0.0 && b_min < b_max)) throw ConfigError("robot: need 0 < b_min < b_max");
  if (!(theta_max > 0.0 && theta_max < kPi)) throw ConfigError("robot: theta_max must be in (0, pi)");
  if (!(f_min < f_max) || !((f_min <= 0.0 && 0.0 <= f_max) || f_min >= 0.0)) {
    throw ConfigError("robot: invalid force limits");
  }
  if (!(body_mass > 0.0 && body_inertia > 0.0 && gripper_mass >= 0.0)) {
    throw ConfigError("robot: masses and inertia must be positive");
  }
  if (!(t_max > 0.0)) throw ConfigError("robot: t_max must be positive");
  if (!(body_half_width > 0.0 && body_half_height > 0.0)) {
    throw ConfigError("robot: body dimensions must be positive");
  }
}

std::array<Vec2, 4> RobotModel::footprint(const Pose& pose) const {
  const Vec2 c = pose.position();
  const double w = body_half_width;
  const double h = body_half_height;
  return {c + rotate(Vec2(w, h), pose.phi), c + rotate(Vec2(-w, h), pose.phi),
          c + rotate(Vec2(-w, -h), pose.phi), c + rotate(Vec2(w, -h), pose.phi)};
}

Vec2 RobotModel::shoulder_world(const Pose& pose, int slot) const {
  return pose.position() + rotate(shoulder_offsets[slot], pose.phi);
}

StanceGeometry boom_geometry(const Pose& pose, const RobotModel& robot,
                             const AnchorSlots& anchors) {
  StanceGeometry out;
  for (int i = 0; i < kNumBooms; ++i) {
    const Anchor* a = anchors[i];
    if (a == nullptr) continue;
    const Vec2 sw = robot.shoulder_world(pose, i);
    const Vec2 d = a->position - sw;
    const double b = d.norm();
    if (!(b > 0.0)) {
      throw GeometryError("boom " + std::to_string(i) + " shoulder coincides with anchor " +
                          std::to_string(a->id));
    }
    BoomGeometry g;
    g.shoulder_world = sw;
    g.length = b;
    g.unit = d / b;
    g.theta = wrap_angle(std::atan2(d.y(), d.x()) - pose.phi -
                         robot.shoulder_equilibrium_angles[i]);
    g.psi = pull_angle(*a, sw);
    out[i] = g;
  }
  return out;
}

BoomGeometryJacobian boom_geometry_jacobian(const Pose& pose, const RobotModel& robot, int slot,
                                            const Anchor& anchor) {
  const Vec2 r = rotate(robot.shoulder_offsets[slot], pose.phi);
  const Vec2 d = anchor.position - pose.position() - r;
  const double b2 = d.squaredNorm();
  const double b = std::sqrt(b2);
  // d(d)/d(x, y, phi) = -(e_x, e_y, perp(r)).
  Eigen::Matrix<double, 2, 3> dd;
  dd.col(0) = Vec2(-1.0, 0.0);
  dd.col(1) = Vec2(0.0, -1.0);
  dd.col(2) = -perp(r);
  BoomGeometryJacobian j;
  const Vec2 u = d / b;
  j.d_length = u.transpose() * dd;
  for (int c = 0; c < 3; ++c) j.d_psi(c) = cross2(d, dd.col(c)) / b2;
  j.d_theta = j.d_psi;
  j.d_theta(2) -= 1.0;
  return j;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> wrench_matrix(const Pose& pose, const RobotModel& robot,
                                                       const AnchorSlots& anchors) {
  const StanceGeometry geo = boom_geometry(pose, robot, anchors);
  int k = 0;
  for (const auto& g : geo) k += g.has_value();
  Eigen::Matrix<double, 3, Eigen::Dynamic> w(3, k);
  int col = 0;
  for (int i = 0; i < kNumBooms; ++i) {
    if (!geo[i]) continue;
    const Vec2 r = geo[i]->shoulder_world - pose.position();
    w(0, col) = geo[i]->unit.x();
    w(1, col) = geo[i]->unit.y();
    w(2, col) = cross2(r, geo[i]->unit);
    ++col;
  }
  return w;
}

Wrench gravity_wrench(const RobotModel& robot, const Vec2& gravity) {
  return Wrench(robot.body_mass * gravity.x(), robot.body_mass * gravity.y(), 0.0);
}

Wrench cantilever_wrench(const Pose& pose, const RobotModel& robot, const Vec2& free_end,
                         const Vec2& gravity) {
  const Vec2 f = robot.gripper_mass * gravity;
  return Wrench(f.x(), f.y(), cross2(free_end - pose.position(), f));
}

FreeBoomHold free_boom_hold(const Pose& pose, const RobotModel& robot, int slot,
                            const Vec2& free_end, const Vec2& gravity) {
  const Vec2 e = free_end - robot.shoulder_world(pose, slot);
  const Vec2 w = robot.gripper_mass * gravity;
  const double b = e.norm();
  const double axial = b > 0.0 ? w.dot(e) / b : 0.0;
  return {axial, -cross2(e, w)};
}

StateVec TrajState::vec() const {
  StateVec v;
  v << pose.x, pose.y, pose.phi, xdot, ydot, phidot;
  return v;
}

TrajState TrajState::from_vec(const StateVec& v) {
  return TrajState{Pose{v(0), v(1), v(2)}, v(3), v(4), v(5)};
}

int ControlInput::attached_count() const {
  int k = 0;
  for (const auto& f : boom_forces) k += f.has_value();
  return k;
}

Eigen::VectorXd ControlInput::vec() const {
  const int k = attached_count();
  const int extra = (free_boom_force ? 1 : 0) + (free_boom_torque ? 1 : 0);
  Eigen::VectorXd v(k + extra);
  int c = 0;
  for (const auto& f : boom_forces) {
    if (f) v(c++) = *f;
  }
  if (free_boom_force) v(c++) = *free_boom_force;
  if (free_boom_torque) v(c++) = *free_boom_torque;
  return v;
}

void ControlInput::set_from_vec(const Eigen::VectorXd& v) {
  int c = 0;
  for (auto& f : boom_forces) {
    if (f) f = v(c++);
  }
  if (free_boom_force) free_boom_force = v(c++);
  if (free_boom_torque) free_boom_torque = v(c++);
}

namespace {

void check_arity(const ControlInput& u, const AnchorSlots& anchors) {
  for (int i = 0; i < kNumBooms; ++i) {
    if (u.boom_forces[i].has_value() != (anchors[i] != nullptr)) {
      throw ContractError("dynamics: control arity does not match stance at slot " +
                          std::to_string(i));
    }
  }
  const int k = u.attached_count();
  const bool free_fields = u.free_boom_force.has_value() || u.free_boom_torque.has_value();
  if (k == kNumBooms && free_fields) {
    throw ContractError("dynamics: 4-stance control must not carry free-boom inputs");
  }
}

}  // namespace

TrajState dynamics_step(const TrajState& s, const ControlInput& u, double dt,
                        const RobotModel& robot, const AnchorSlots& anchors, const Vec2& gravity,
                        const Wrench& external) {
  check_arity(u, anchors);
  const auto w = wrench_matrix(s.pose, robot, anchors);
  Eigen::VectorXd f(w.cols());
  int c = 0;
  for (const auto& fi : u.boom_forces) {
    if (fi) f(c++) = *fi;
  }
  const Wrench net = w * f + gravity_wrench(robot, gravity) + external;
  TrajState out;
  out.pose.x = s.pose.x + dt * s.xdot;
  out.pose.y = s.pose.y + dt * s.ydot;
  out.pose.phi = s.pose.phi + dt * s.phidot;
  out.xdot = s.xdot + dt * net(0) / robot.body_mass;
  out.ydot = s.ydot + dt * net(1) / robot.body_mass;
  out.phidot = s.phidot + dt * net(2) / robot.body_inertia;
  return out;
}

DynamicsJacobians dynamics_jacobians(const TrajState& s, const ControlInput& u, double dt,
                                     const RobotModel& robot, const AnchorSlots& anchors,
                                     const Vec2& gravity, const Wrench& external) {
  (void)gravity;
  (void)external;
  check_arity(u, anchors);
  const Eigen::VectorXd uv = u.vec();
  DynamicsJacobians j;
  j.d_state.setIdentity();
  j.d_state.block<3, 3>(0, 3) = dt * Eigen::Matrix3d::Identity();
  j.d_control = Eigen::MatrixXd::Zero(6, uv.size());

  const Eigen::Vector3d inv_mass(1.0 / robot.body_mass, 1.0 / robot.body_mass,
                                 1.0 / robot.body_inertia);
  Eigen::Matrix3d d_net_d_pose = Eigen::Matrix3d::Zero();
  const StanceGeometry geo = boom_geometry(s.pose, robot, anchors);
  int col = 0;
  for (int i = 0; i < kNumBooms; ++i) {
    if (!geo[i]) continue;
    const double f = *u.boom_forces[i];
    const Vec2 r = geo[i]->shoulder_world - s.pose.position();
    const Vec2 unit = geo[i]->unit;
    const double b = geo[i]->length;
    Eigen::Matrix<double, 2, 3> dd;
    dd.col(0) = Vec2(-1.0, 0.0);
    dd.col(1) = Vec2(0.0, -1.0);
    dd.col(2) = -perp(r);
    const Eigen::Matrix2d proj = (Eigen::Matrix2d::Identity() - unit * unit.transpose()) / b;
    const Eigen::Matrix<double, 2, 3> du = proj * dd;
    for (int q = 0; q < 3; ++q) {
      const Vec2 dr = q == 2 ? perp(r) : Vec2::Zero();
      d_net_d_pose(0, q) += f * du(0, q);
      d_net_d_pose(1, q) += f * du(1, q);
      d_net_d_pose(2, q) += f * (cross2(dr, unit) + cross2(r, du.col(q)));
    }
    j.d_control(3, col) = dt * unit.x() * inv_mass(0);
    j.d_control(4, col) = dt * unit.y() * inv_mass(1);
    j.d_control(5, col) = dt * cross2(r, unit) * inv_mass(2);
    ++col;
  }
  j.d_state.block<3, 3>(3, 0) = dt * inv_mass.asDiagonal() * d_net_d_pose;
  return j;
}

}  // namespace stochgrasp
