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

// Planar kinematics and rigid-body mechanics of a four-boom climber.
//
// Boom slots are numbered counter-clockwise from the upper-right corner:
// 0 = (+,+), 1 = (-,+), 2 = (-,-), 3 = (+,-) in the body frame. Each boom
// carries tension only, pulling its shoulder toward the anchor.

#ifndef STOCHGRASP_ROBOT_HPP_
#define STOCHGRASP_ROBOT_HPP_

#include <array>
#include <optional>
#include <vector>

#include "stochgrasp/common.hpp"
#include "stochgrasp/grasp.hpp"

namespace stochgrasp {

struct RobotModel {
  double body_half_width = 0.1;
  double body_half_height = 0.1;
  std::array<Vec2, kNumBooms> shoulder_offsets{Vec2(0.1, 0.1), Vec2(-0.1, 0.1),
                                               Vec2(-0.1, -0.1), Vec2(0.1, -0.1)};
  std::array<double, kNumBooms> shoulder_equilibrium_angles{0.25 * kPi, 0.75 * kPi,
                                                            -0.75 * kPi, -0.25 * kPi};
  double body_mass = 2.0;
  double body_inertia = 2.0 / 3.0 * 2.0 * 0.1 * 0.1;
  double gripper_mass = 0.2;
  double b_min = 0.01;
  double b_max = 2.0;
  double theta_max = 0.25 * kPi;
  double f_min = 0.0;
  double f_max = 30.0;
  double t_max = 2.0;

  void validate() const;
  // Body footprint corners in the world frame, counter-clockwise.
  std::array<Vec2, 4> footprint(const Pose& pose) const;
  Vec2 shoulder_world(const Pose& pose, int slot) const;
};

// One anchor pointer per slot; nullptr marks a detached boom.
using AnchorSlots = std::array<const Anchor*, kNumBooms>;

struct BoomGeometry {
  Vec2 shoulder_world;
  double length;
  double theta;  // deviation from the world-frame equilibrium direction
  double psi;    // pull angle at the anchor
  Vec2 unit;     // shoulder -> anchor
};

using StanceGeometry = std::array<std::optional<BoomGeometry>, kNumBooms>;

// Throws GeometryError when an anchor coincides with its shoulder.
StanceGeometry boom_geometry(const Pose& pose, const RobotModel& robot,
                             const AnchorSlots& anchors);

// Partial derivatives of one boom's (length, theta, psi) w.r.t. (x, y, phi).
struct BoomGeometryJacobian {
  Eigen::RowVector3d d_length;
  Eigen::RowVector3d d_theta;
  Eigen::RowVector3d d_psi;
};

BoomGeometryJacobian boom_geometry_jacobian(const Pose& pose, const RobotModel& robot, int slot,
                                            const Anchor& anchor);

// 3 x k map from attached-boom tensions (slot order) to body wrench.
Eigen::Matrix<double, 3, Eigen::Dynamic> wrench_matrix(const Pose& pose, const RobotModel& robot,
                                                       const AnchorSlots& anchors);

// Gravity acting on the body mass, applied at the body center.
Wrench gravity_wrench(const RobotModel& robot, const Vec2& gravity);

// Wrench the weight of a detached, statically held gripper exerts on the
// body: force m*g and torque (free_end - center) x m*g. For gravity
// (0, -g) the torque is -m*g*dx with dx the horizontal offset of the free
// end from the body center.
Wrench cantilever_wrench(const Pose& pose, const RobotModel& robot, const Vec2& free_end,
                         const Vec2& gravity);

// Actuator loads that hold the detached boom still: prismatic tension along
// shoulder -> free end and the shoulder torque on the boom.
struct FreeBoomHold {
  double force;
  double torque;
};

FreeBoomHold free_boom_hold(const Pose& pose, const RobotModel& robot, int slot,
                            const Vec2& free_end, const Vec2& gravity);

// Continuous state s = (x, y, phi, xdot, ydot, phidot).
using StateVec = Eigen::Matrix<double, 6, 1>;

struct TrajState {
  Pose pose;
  double xdot = 0.0;
  double ydot = 0.0;
  double phidot = 0.0;

  StateVec vec() const;
  static TrajState from_vec(const StateVec& v);
  static TrajState at_rest(const Pose& p) { return TrajState{p, 0.0, 0.0, 0.0}; }
};

struct ControlInput {
  std::array<std::optional<double>, kNumBooms> boom_forces;
  std::optional<double> free_boom_force;
  std::optional<double> free_boom_torque;

  int attached_count() const;
  // Stacked decision vector: attached forces in slot order, then free
  // force and torque when present.
  Eigen::VectorXd vec() const;
  void set_from_vec(const Eigen::VectorXd& v);
};

// Explicit Euler step of the body's Newton-Euler equations. Attached boom
// tensions act through wrench_matrix; `external` carries every other load
// (the cantilevered boom in a 3-stance). The detached boom's own actuator
// loads are internal to the boom-body pair and already part of the
// cantilever wrench, so they do not enter here. Throws ContractError when
// the control's attached slots do not match `anchors`.
TrajState dynamics_step(const TrajState& s, const ControlInput& u, double dt,
                        const RobotModel& robot, const AnchorSlots& anchors, const Vec2& gravity,
                        const Wrench& external);

struct DynamicsJacobians {
  Eigen::Matrix<double, 6, 6> d_state;
  Eigen::MatrixXd d_control;  // 6 x u.vec().size()
};

// Analytic Jacobians of dynamics_step with `external` held fixed.
DynamicsJacobians dynamics_jacobians(const TrajState& s, const ControlInput& u, double dt,
                                     const RobotModel& robot, const AnchorSlots& anchors,
                                     const Vec2& gravity, const Wrench& external);

}  // namespace stochgrasp

#endif  // STOCHGRASP_ROBOT_HPP_
