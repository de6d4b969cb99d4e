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

#include <vector>

#include "stochgrasp/feasibility.hpp"
#include "stochgrasp/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace stochgrasp {
namespace {

using testing::OracleAllocation;
using testing::oracle_allocate;

Stance box_stance() {
  Stance s;
  s.anchor_ids = {2, 3, 1, 0};
  return s;
}

TEST(FeasibilityTest, StanceHelpers) {
  const Stance s = box_stance();
  EXPECT_TRUE(s.is_four());
  const Stance t = s.without(2);
  EXPECT_EQ(t.attached_count(), 3);
  EXPECT_EQ(t.free_slot(), 2);
  EXPECT_EQ(differing_slot(s, s.with(1, 7)), 1);
  EXPECT_EQ(differing_slot(s, s), -1);
  const Environment env = testing::square_box();
  EXPECT_NEAR(s.centroid(env).x(), 1.0, 1e-15);
  EXPECT_NEAR(s.centroid(env).y(), 1.0, 1e-15);
  Stance dup = s;
  dup.anchor_ids[0] = 3;
  EXPECT_THROW(dup.resolve(env), ContractError);
}

TEST(FeasibilityTest, SymmetricTwoBoomAllocation) {
  // Two booms hanging the body symmetrically from the ceiling share the
  // weight equally: 2 f cos(45 deg) = m g.
  Environment env = testing::flat_corridor(2.0, 2.0, {}, {0.1, 1.9}, {40, 25, 0.5, 0.2});
  RobotModel robot;
  Stance s;
  s.anchor_ids = {1, 0, std::nullopt, std::nullopt};
  const Pose pose{1.0, 1.1, 0.0};
  const auto alloc = allocate_forces(pose, s, Wrench::Zero(), robot, env);
  ASSERT_TRUE(alloc.has_value());
  const double expected = robot.body_mass * 3.71 / (2.0 * std::cos(0.25 * kPi));
  EXPECT_NEAR(alloc->forces(0), expected, 1e-9);
  EXPECT_NEAR(alloc->forces(1), expected, 1e-9);
}

TEST(FeasibilityTest, ZeroLoadGivesZeroTension) {
  Environment env = testing::square_box();
  env.gravity = Vec2::Zero();
  const auto alloc = allocate_forces({1, 1, 0}, box_stance(), Wrench::Zero(), RobotModel{}, env);
  ASSERT_TRUE(alloc.has_value());
  // Tension-only booms: any allocation is a nonnegative multiple of the null
  // vector, and the most robust one is the smallest.
  EXPECT_LT(alloc->forces.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FeasibilityTest, AllocationMatchesNullSpaceGridOracle) {
  Rng rng(31);
  const RobotModel robot;
  int compared = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Environment env = testing::square_box();
    for (auto& a : env.anchors) a.limit = testing::random_limit(rng);
    const Pose pose{rng.uniform(0.8, 1.2), rng.uniform(0.8, 1.2), rng.uniform(-0.3, 0.3)};
    const Stance s = box_stance();
    const auto alloc = allocate_forces(pose, s, Wrench::Zero(), robot, env);
    const OracleAllocation oracle = oracle_allocate(pose, env, s, robot);
    ASSERT_EQ(alloc.has_value(), oracle.exists) << trial;
    if (!alloc) continue;
    ++compared;
    EXPECT_NEAR(alloc->robustness, oracle.robustness, 1e-6) << trial;
    EXPECT_GE(alloc->robustness + 1e-9, oracle.robustness) << trial;
    const auto w = wrench_matrix(pose, robot, s.resolve(env));
    const Wrench resid = w * alloc->forces + gravity_wrench(robot, env.gravity);
    EXPECT_LE(resid.norm(), 1e-6);
    EXPECT_GE(alloc->forces.minCoeff(), robot.f_min);
    EXPECT_LE(alloc->forces.maxCoeff(), robot.f_max);
  }
  EXPECT_GT(compared, 30);
}

TEST(FeasibilityTest, PoseFeasibleCases) {
  const Environment env = testing::square_box();
  const PlannerConfig cfg;
  RobotModel robot;
  const FeasibilityReport ok = pose_feasible({1, 1, 0}, box_stance(), Wrench::Zero(), robot, env, cfg);
  EXPECT_TRUE(ok.feasible);
  ASSERT_TRUE(ok.robustness.has_value());
  EXPECT_GE(*ok.robustness, cfg.r_min);
  EXPECT_EQ(ok.failure_reason, FailureReason::none);

  RobotModel short_booms;
  short_booms.b_max = 0.5;
  EXPECT_EQ(pose_feasible({1, 1, 0}, box_stance(), Wrench::Zero(), short_booms, env, cfg)
                .failure_reason,
            FailureReason::kinematic);

  // A rock spike through the body with every boom in range.
  Environment spiked = env;
  spiked.walls.push_back({Vec2(0.95, 1.0), Vec2(1.05, 1.0)});
  EXPECT_EQ(pose_feasible({1, 1, 0}, box_stance(), Wrench::Zero(), robot, spiked, cfg)
                .failure_reason,
            FailureReason::collision);

  Environment weak = env;
  for (auto& a : weak.anchors) a.limit = LimitSurface{3.0, 2.0, 1.0, 0.5};
  const FeasibilityReport bad = pose_feasible({1, 1, 0}, box_stance(), Wrench::Zero(), robot, weak, cfg);
  EXPECT_FALSE(bad.feasible);
  EXPECT_EQ(bad.failure_reason, FailureReason::no_robust_allocation);
  EXPECT_FALSE(bad.best_pose.has_value());
}

TEST(FeasibilityTest, FindFeasiblePoseProperties) {
  const Environment env = testing::square_box();
  const RobotModel robot;
  PlannerConfig cfg;
  const std::array<Wrench, 1> ext{Wrench::Zero()};
  const auto a = find_feasible_pose(box_stance(), ext, std::nullopt, robot, env, cfg);
  const auto b = find_feasible_pose(box_stance(), ext, std::nullopt, robot, env, cfg);
  ASSERT_TRUE(a.has_value());
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(a->pose, b->pose);
  EXPECT_EQ(a->robustness, b->robustness);
  const FeasibilityReport rep = pose_feasible(a->pose, box_stance(), Wrench::Zero(), robot, env, cfg);
  EXPECT_TRUE(rep.feasible);
  EXPECT_NEAR(*rep.robustness, a->robustness, 1e-12);

  // No stance can hold against impossible loads.
  const std::array<Wrench, 1> huge{Wrench(0, -500, 0)};
  EXPECT_FALSE(find_feasible_pose(box_stance(), huge, std::nullopt, robot, env, cfg).has_value());
}

TEST(FeasibilityTest, TransitionIsSymmetricAndWitnessHoldsAllConditions) {
  const Environment env =
      testing::flat_corridor(3.0, 2.0, {0.4, 1.6, 2.2}, {0.4, 1.6, 2.2}, {40, 25, 0.5, 0.2});
  const RobotModel robot;
  PlannerConfig cfg;
  Stance from;
  from.anchor_ids = {4, 3, 0, 1};
  const Stance to = from.with(3, 2);
  const auto ab = transition_feasible(from, to, robot, env, cfg);
  const auto ba = transition_feasible(to, from, robot, env, cfg);
  ASSERT_EQ(ab.has_value(), ba.has_value());
  ASSERT_TRUE(ab.has_value());
  EXPECT_EQ(ab->pose, ba->pose);
  const auto conds = transition_conditions(from, to, env);
  ASSERT_EQ(conds.size(), 4u);
  EXPECT_TRUE(conds[2].free_end.has_value());
  EXPECT_TRUE(pose_feasible(ab->pose, conds, robot, env, cfg).feasible);
  EXPECT_THROW(transition_conditions(from, from, env), ContractError);
  EXPECT_THROW(transition_conditions(from, to.with(0, 5), env), ContractError);
}

TEST(FeasibilityTest, HoldConditionExternalIncludesCantilever) {
  const RobotModel robot;
  Stance s = box_stance().without(0);
  const HoldCondition c{s, Vec2(1.5, 1.0), Wrench(0, 0, 0.1)};
  const Wrench w = c.external({1, 1, 0}, robot, Vec2(0, -3.71));
  EXPECT_NEAR(w(1), -0.742, 1e-12);
  EXPECT_NEAR(w(2), 0.1 - 0.742 * 0.5, 1e-12);
}

TEST(FeasibilityTest, PlannerConfigValidation) {
  PlannerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.pose_samples = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace stochgrasp
