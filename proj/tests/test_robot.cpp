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

#include <gtest/gtest.h>

#include "stochgrasp/robot.hpp"
#include "stochgrasp/rng.hpp"
#include "test_support.hpp"

namespace stochgrasp {
namespace {

struct Fixture {
  Environment env = testing::square_box();
  RobotModel robot;
  // Slot order UR, UL, LL, LR onto ceiling-right, ceiling-left, floor-left,
  // floor-right.
  AnchorSlots slots{&env.anchors[2], &env.anchors[3], &env.anchors[1], &env.anchors[0]};
};

Pose random_pose(Rng& rng) {
  return Pose{rng.uniform(0.7, 1.3), rng.uniform(0.7, 1.3), rng.uniform(-0.4, 0.4)};
}

TEST(RobotTest, FootprintAndShoulders) {
  const RobotModel robot;
  const auto fp = robot.footprint({1.0, 2.0, 0.5 * kPi});
  EXPECT_NEAR(fp[0].x(), 0.9, 1e-15);
  EXPECT_NEAR(fp[0].y(), 2.1, 1e-15);
  const Vec2 s = robot.shoulder_world({0.0, 0.0, kPi}, 0);
  EXPECT_NEAR(s.x(), -0.1, 1e-15);
  EXPECT_NEAR(s.y(), -0.1, 1e-15);
  EXPECT_NO_THROW(robot.validate());
  RobotModel bad;
  bad.b_min = 3.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(RobotTest, BoomGeometryExample) {
  RobotModel robot;
  const Anchor a = testing::make_anchor(0, {1.1, 1.1}, {-1.0, 0.0});
  AnchorSlots slots{&a, nullptr, nullptr, nullptr};
  const StanceGeometry g = boom_geometry({0, 0, 0}, robot, slots);
  ASSERT_TRUE(g[0].has_value());
  EXPECT_FALSE(g[1].has_value());
  EXPECT_NEAR(g[0]->length, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(g[0]->theta, 0.0, 1e-14);
  // Anchor faces -x; pulled from below-left at 45 degrees.
  EXPECT_NEAR(std::abs(g[0]->psi), 0.25 * kPi, 1e-14);
  const Anchor on_shoulder = testing::make_anchor(1, {0.1, 0.1}, {0, 1});
  slots[0] = &on_shoulder;
  EXPECT_THROW(boom_geometry({0, 0, 0}, robot, slots), GeometryError);
}

TEST(RobotTest, WrenchMatrixMatchesSummation) {
  Fixture fx;
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Pose p = random_pose(rng);
    const auto w = wrench_matrix(p, fx.robot, fx.slots);
    ASSERT_EQ(w.cols(), 4);
    Eigen::Vector4d f;
    for (int i = 0; i < 4; ++i) f(i) = rng.uniform(0, 10);
    Wrench expected = Wrench::Zero();
    for (int i = 0; i < 4; ++i) {
      const Vec2 s = p.position() + rotate(fx.robot.shoulder_offsets[i], p.phi);
      const Vec2 dir = (fx.slots[i]->position - s).normalized();
      expected.head<2>() += f(i) * dir;
      expected(2) += f(i) * cross2(s - p.position(), dir);
      EXPECT_NEAR(w.col(i).head<2>().norm(), 1.0, 1e-14);
    }
    EXPECT_LT((w * f - expected).norm(), 1e-12);
  }
}

TEST(RobotTest, WrenchMatrixSkipsDetached) {
  Fixture fx;
  fx.slots[1] = nullptr;
  EXPECT_EQ(wrench_matrix({1, 1, 0}, fx.robot, fx.slots).cols(), 3);
}

TEST(RobotTest, CantileverExamples) {
  const RobotModel robot;
  const Vec2 g(0.0, -3.71);
  const Wrench w = cantilever_wrench({0, 0, 0}, robot, {0.5, 0.3}, g);
  EXPECT_NEAR(w(0), 0.0, 1e-15);
  EXPECT_NEAR(w(1), -0.742, 1e-12);
  EXPECT_NEAR(w(2), -0.2 * 3.71 * 0.5, 1e-12);
  // Hanging directly below the center: no torque.
  EXPECT_NEAR(cantilever_wrench({1, 1, 0.3}, robot, {1.0, 0.2}, g)(2), 0.0, 1e-15);
  const FreeBoomHold h = free_boom_hold({0, 0, 0}, robot, 0, {0.6, 0.1}, g);
  EXPECT_NEAR(h.force, 0.0, 1e-15);
  EXPECT_NEAR(h.torque, 0.5 * 0.742, 1e-12);
  // Hanging straight down from the shoulder: pure axial tension.
  const FreeBoomHold down = free_boom_hold({0, 0, 0}, robot, 0, {0.1, -0.4}, g);
  EXPECT_NEAR(down.force, 0.742, 1e-12);
  EXPECT_NEAR(down.torque, 0.0, 1e-15);
}

TEST(RobotTest, DynamicsStepExamples) {
  Fixture fx;
  const Vec2 g(0.0, -3.71);
  // Free fall with zero tension.
  ControlInput u;
  for (int i = 0; i < 4; ++i) u.boom_forces[i] = 0.0;
  TrajState s = TrajState::at_rest({1, 1, 0});
  s.xdot = 0.2;
  const TrajState n = dynamics_step(s, u, 0.5, fx.robot, fx.slots, g, Wrench::Zero());
  EXPECT_NEAR(n.pose.x, 1.1, 1e-15);
  EXPECT_NEAR(n.pose.y, 1.0, 1e-15);
  EXPECT_NEAR(n.xdot, 0.2, 1e-15);
  EXPECT_NEAR(n.ydot, -0.5 * 3.71, 1e-14);
  // External wrench enters like any other load.
  const TrajState e = dynamics_step(s, u, 0.5, fx.robot, fx.slots, g, Wrench(0, 7.42, 0.1));
  EXPECT_NEAR(e.ydot, 0.5 * (7.42 - 7.42) / 2.0, 1e-14);
  EXPECT_NEAR(e.phidot, 0.5 * 0.1 / fx.robot.body_inertia, 1e-14);
}

TEST(RobotTest, DynamicsMatchesNewtonEulerOracle) {
  Fixture fx;
  Rng rng(4);
  const Vec2 g(0.0, -3.71);
  for (int t = 0; t < 50; ++t) {
    const Pose p = random_pose(rng);
    TrajState s{p, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    ControlInput u;
    for (int i = 0; i < 4; ++i) u.boom_forces[i] = rng.uniform(0, 20);
    const Wrench ext(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double dt = 0.3;
    Vec2 force = fx.robot.body_mass * g + ext.head<2>();
    double torque = ext(2);
    for (int i = 0; i < 4; ++i) {
      const Vec2 arm = rotate(fx.robot.shoulder_offsets[i], p.phi);
      const Vec2 dir = (fx.slots[i]->position - p.position() - arm).normalized();
      force += *u.boom_forces[i] * dir;
      torque += *u.boom_forces[i] * (arm.x() * dir.y() - arm.y() * dir.x());
    }
    const TrajState n = dynamics_step(s, u, dt, fx.robot, fx.slots, g, ext);
    EXPECT_NEAR(n.pose.x, p.x + dt * s.xdot, 1e-14);
    EXPECT_NEAR(n.pose.phi, p.phi + dt * s.phidot, 1e-14);
    EXPECT_NEAR(n.xdot, s.xdot + dt * force.x() / fx.robot.body_mass, 1e-12);
    EXPECT_NEAR(n.ydot, s.ydot + dt * force.y() / fx.robot.body_mass, 1e-12);
    EXPECT_NEAR(n.phidot, s.phidot + dt * torque / fx.robot.body_inertia, 1e-12);
  }
}

TEST(RobotTest, DynamicsArityContract) {
  Fixture fx;
  ControlInput u;
  u.boom_forces = {1.0, 1.0, 1.0, std::nullopt};
  EXPECT_THROW(dynamics_step(TrajState::at_rest({1, 1, 0}), u, 0.5, fx.robot, fx.slots,
                             Vec2(0, -3.71), Wrench::Zero()),
               ContractError);
}

TEST(RobotTest, JacobianStructure) {
  Fixture fx;
  ControlInput u;
  for (int i = 0; i < 4; ++i) u.boom_forces[i] = 5.0;
  const double dt = 0.5;
  const DynamicsJacobians j = dynamics_jacobians(TrajState::at_rest({1, 1, 0.1}), u, dt, fx.robot,
                                                 fx.slots, Vec2(0, -3.71), Wrench::Zero());
  EXPECT_TRUE((j.d_state.topLeftCorner<3, 3>().isIdentity(0.0)));
  EXPECT_TRUE((j.d_state.topRightCorner<3, 3>().isApprox(dt * Eigen::Matrix3d::Identity())));
  EXPECT_TRUE((j.d_state.bottomRightCorner<3, 3>().isIdentity(0.0)));
  EXPECT_TRUE(j.d_control.topRows<3>().isZero(0.0));
  EXPECT_EQ(j.d_control.cols(), 4);
}

TEST(RobotTest, GeometryJacobianMatchesFiniteDifferences) {
  Fixture fx;
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const Pose p = random_pose(rng);
    for (int slot = 0; slot < 4; ++slot) {
      const BoomGeometryJacobian j = boom_geometry_jacobian(p, fx.robot, slot, *fx.slots[slot]);
      for (int c = 0; c < 3; ++c) {
        const double h = 1e-6;
        Vec3 vp = p.vec(), vm = p.vec();
        vp(c) += h;
        vm(c) -= h;
        AnchorSlots one{};
        one[slot] = fx.slots[slot];
        const auto gp = boom_geometry(Pose{vp(0), vp(1), vp(2)}, fx.robot, one)[slot].value();
        const auto gm = boom_geometry(Pose{vm(0), vm(1), vm(2)}, fx.robot, one)[slot].value();
        EXPECT_NEAR(j.d_length(c), (gp.length - gm.length) / (2 * h), 1e-7);
        EXPECT_NEAR(j.d_theta(c), (gp.theta - gm.theta) / (2 * h), 1e-7);
        EXPECT_NEAR(j.d_psi(c), (gp.psi - gm.psi) / (2 * h), 1e-7);
      }
    }
  }
}

TEST(RobotTest, DynamicsJacobianMatchesFiniteDifferences) {
  Fixture fx;
  Rng rng(7);
  const Vec2 g(0.0, -3.71);
  for (int t = 0; t < 100; ++t) {
    const TrajState s{random_pose(rng), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    ControlInput u;
    for (int i = 0; i < 4; ++i) u.boom_forces[i] = rng.uniform(0, 20);
    const Wrench ext(0.1, -0.7, 0.05);
    const DynamicsJacobians j = dynamics_jacobians(s, u, 0.5, fx.robot, fx.slots, g, ext);
    const double h = 1e-6;
    for (int c = 0; c < 6; ++c) {
      StateVec vp = s.vec(), vm = s.vec();
      vp(c) += h;
      vm(c) -= h;
      const StateVec d = (dynamics_step(TrajState::from_vec(vp), u, 0.5, fx.robot, fx.slots, g, ext)
                              .vec() -
                          dynamics_step(TrajState::from_vec(vm), u, 0.5, fx.robot, fx.slots, g, ext)
                              .vec()) /
                         (2 * h);
      const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
      EXPECT_LT((j.d_state.col(c) - d).cwiseAbs().maxCoeff() / scale, 1e-4) << c;
    }
    for (int c = 0; c < 4; ++c) {
      ControlInput up = u, um = u;
      *up.boom_forces[c] += h;
      *um.boom_forces[c] -= h;
      const StateVec d = (dynamics_step(s, up, 0.5, fx.robot, fx.slots, g, ext).vec() -
                          dynamics_step(s, um, 0.5, fx.robot, fx.slots, g, ext).vec()) /
                         (2 * h);
      const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
      EXPECT_LT((j.d_control.col(c) - d).cwiseAbs().maxCoeff() / scale, 1e-4) << c;
    }
  }
}

TEST(RobotTest, ControlVectorRoundTrip) {
  ControlInput u;
  u.boom_forces = {1.0, std::nullopt, 3.0, 4.0};
  u.free_boom_force = 0.5;
  u.free_boom_torque = -0.25;
  EXPECT_EQ(u.attached_count(), 3);
  Eigen::VectorXd v = u.vec();
  ASSERT_EQ(v.size(), 5);
  v *= 2.0;
  u.set_from_vec(v);
  EXPECT_EQ(*u.boom_forces[2], 6.0);
  EXPECT_EQ(*u.free_boom_torque, -0.5);
  EXPECT_FALSE(u.boom_forces[1].has_value());
}

}  // namespace
}  // namespace stochgrasp
