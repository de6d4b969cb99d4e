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

#include <cmath>
#include <vector>

#include "stochgrasp/eval.hpp"
#include "stochgrasp/rng.hpp"
#include "test_support.hpp"

namespace stochgrasp {
namespace {

using testing::oracle_phi;

GraspConfiguration config_at(const Pose& pose, std::array<std::optional<int>, 4> ids,
                             std::array<double, 4> forces) {
  GraspConfiguration c;
  c.pose = pose;
  c.anchor_ids = ids;
  c.forces = forces;
  return c;
}

TEST(MonteCarloTest, ZeroForcesAlmostAlwaysHold) {
  const Environment env = testing::square_box();
  const std::array<GraspConfiguration, 2> seq{config_at({1, 1, 0}, {2, 3, 1, 0}, {0, 0, 0, 0}),
                                              config_at({1, 1, 0.1}, {2, 3, 1, 0}, {0, 0, 0, 0})};
  const McEstimate mc = monte_carlo_success(seq, env, RobotModel{}, 10000, 1);
  EXPECT_GE(mc.rate, 0.999);
}

TEST(MonteCarloTest, SingleEpisodeMatchesCdf) {
  Environment env = testing::square_box();
  for (auto& a : env.anchors) a.limit = LimitSurface{12, 8, 2, 1};
  const RobotModel robot;
  const Pose pose{1, 1, 0};
  // One attached grasp would not be a stance, but episodes only need ids.
  const std::array<GraspConfiguration, 1> one{
      config_at(pose, {2, std::nullopt, std::nullopt, std::nullopt}, {11.0, 0, 0, 0})};
  const Anchor& a = env.anchor(2);
  const MuSigma ms = mu_sigma(a.limit, pull_angle(a, robot.shoulder_world(pose, 0)));
  const double p = oracle_phi((ms.mu - 11.0) / ms.sigma);
  const McEstimate mc = monte_carlo_success(one, env, robot, 20000, 9);
  EXPECT_NEAR(mc.rate, p, 3.0 * std::sqrt(p * (1 - p) / 20000));
  EXPECT_NEAR(mc.std_error, std::sqrt(mc.rate * (1 - mc.rate) / 20000), 1e-12);
}

TEST(MonteCarloTest, AgreesWithAnalyticOnRandomPlans) {
  Environment env = testing::square_box();
  for (auto& a : env.anchors) a.limit = LimitSurface{14, 9, 1.5, 1};
  const RobotModel robot;
  Rng rng(4);
  for (int plan = 0; plan < 10; ++plan) {
    std::vector<GraspConfiguration> seq;
    const int steps = 2 + static_cast<int>(rng.uniform() * 6);
    for (int k = 0; k < steps; ++k) {
      std::array<std::optional<int>, 4> ids{2, 3, 1, 0};
      if (rng.uniform() < 0.3) ids[static_cast<int>(rng.uniform() * 4)] = std::nullopt;
      std::array<double, 4> f{};
      for (auto& x : f) x = rng.uniform(2.0, 9.0);
      seq.push_back(config_at({rng.uniform(0.9, 1.1), rng.uniform(0.9, 1.1), rng.uniform(-0.2, 0.2)},
                              ids, f));
    }
    const double p = std::exp(plan_success_log_prob(seq, env, robot));
    const McEstimate mc = monte_carlo_success(seq, env, robot, 20000, derive_seed(5, plan));
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / 20000);
    EXPECT_NEAR(mc.rate, p, 3.0 * se) << "plan " << plan;
  }
}

TEST(MonteCarloTest, RejectsTooFewSamples) {
  const Environment env = testing::square_box();
  const std::array<GraspConfiguration, 1> one{config_at({1, 1, 0}, {2, 3, 1, 0}, {1, 1, 1, 1})};
  EXPECT_THROW(monte_carlo_success(one, env, RobotModel{}, 99, 1), std::invalid_argument);
  EXPECT_NO_THROW(monte_carlo_success(one, env, RobotModel{}, kMinMonteCarloSamples, 1));
  PlanResult incomplete;
  EXPECT_THROW(monte_carlo_success(incomplete, env, RobotModel{}, 1000, 1), ContractError);
}

TEST(MonteCarloTest, QuadruplingSamplesHalvesStdError) {
  Environment env = testing::square_box();
  for (auto& a : env.anchors) a.limit = LimitSurface{12, 8, 2, 1};
  const std::array<GraspConfiguration, 1> one{config_at({1, 1, 0}, {2, 3, 1, 0}, {8, 8, 8, 8})};
  const McEstimate a = monte_carlo_success(one, env, RobotModel{}, 5000, 3);
  const McEstimate b = monte_carlo_success(one, env, RobotModel{}, 20000, 4);
  ASSERT_GT(a.rate, 0.1);
  ASSERT_LT(a.rate, 0.9);
  EXPECT_NEAR(b.std_error / a.std_error, 0.5, 0.05);
}

TEST(MonteCarloTest, DeterministicInSeed) {
  Environment env = testing::square_box();
  for (auto& a : env.anchors) a.limit = LimitSurface{12, 8, 2, 1};
  const std::array<GraspConfiguration, 1> one{config_at({1, 1, 0}, {2, 3, 1, 0}, {8, 8, 8, 8})};
  EXPECT_EQ(monte_carlo_success(one, env, RobotModel{}, 1000, 3).rate,
            monte_carlo_success(one, env, RobotModel{}, 1000, 3).rate);
}

TrialRecord record(PlannerKind k, bool found, double p) {
  TrialRecord r;
  r.planner = k;
  r.plan_found = found;
  r.analytic_log_prob = found ? std::log(p) : kNegInf;
  if (found) r.timings["footstep"] = p;
  return r;
}

TEST(SummaryTest, HistogramCountsFoundPlans) {
  const std::vector<TrialRecord> recs{
      record(PlannerKind::rbp, true, 0.97), record(PlannerKind::naive, true, 0.2),
      record(PlannerKind::rbp, true, 1.0),  record(PlannerKind::naive, false, 0),
      record(PlannerKind::rbp, false, 0),   record(PlannerKind::naive, true, 0.05)};
  const Histogram h = success_histogram(recs, 10);
  ASSERT_EQ(h.edges.size(), 11u);
  EXPECT_EQ(h.edges.front(), 0.0);
  EXPECT_EQ(h.edges.back(), 1.0);
  int rbp = 0, naive = 0;
  for (int c : h.counts.at(PlannerKind::rbp)) rbp += c;
  for (int c : h.counts.at(PlannerKind::naive)) naive += c;
  EXPECT_EQ(rbp, 2);
  EXPECT_EQ(naive, 2);
  EXPECT_EQ(h.counts.at(PlannerKind::rbp)[9], 2);  // 1.0 lands in the last bin
  EXPECT_EQ(h.counts.at(PlannerKind::naive)[0], 1);
  EXPECT_EQ(h.counts.at(PlannerKind::naive)[2], 1);
}

TEST(SummaryTest, MedianAndTimings) {
  const std::vector<TrialRecord> recs{record(PlannerKind::rbp, true, 0.9),
                                      record(PlannerKind::rbp, true, 0.5),
                                      record(PlannerKind::rbp, false, 0),
                                      record(PlannerKind::rbp, true, 0.7)};
  EXPECT_NEAR(median_success(recs, PlannerKind::rbp), 0.7, 1e-12);
  EXPECT_TRUE(std::isnan(median_success(recs, PlannerKind::naive)));
  const auto t = timing_summary(recs);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].phase, "rbp_footstep");
  EXPECT_EQ(t[0].count, 3);
  EXPECT_NEAR(t[0].mean, 0.7, 1e-12);
  EXPECT_NEAR(t[0].stddev, 0.2, 1e-12);
}

TEST(ForceLogTest, ConstantLogAtMeanLimitIsCoinFlip) {
  const LimitSurface ls{20, 8, 1, 0.5};
  std::array<Anchor, 4> anchors;
  for (int i = 0; i < 4; ++i) anchors[i] = testing::make_anchor(i, {0, 0}, {0, 1}, ls);
  const double psi = 0.3;
  const double mu = testing::oracle_mu(20, 8, psi);
  std::vector<ForceLogEntry> log;
  for (int k = 0; k < 5; ++k) {
    ForceLogEntry e;
    e.time = k * 0.1;
    for (int a = 0; a < 4; ++a) {
      e.force[a] = mu;
      e.angle[a] = 0.5 * kPi + psi;  // normal (0, 1) rotated by psi
    }
    log.push_back(e);
  }
  const ForceLogAnalysis out = analyze_force_log(log, anchors);
  ASSERT_EQ(out.probability.size(), 5u);
  for (const auto& row : out.probability) {
    for (double p : row) EXPECT_NEAR(p, 0.5, 1e-12);
  }
  EXPECT_NEAR(out.psi[0][0], psi, 1e-12);
}

TEST(ForceLogTest, ProbabilityRisesAsPullAlignsWithNormal) {
  std::array<Anchor, 4> anchors;
  Rng rng(12);
  for (int i = 0; i < 4; ++i) {
    anchors[i] = testing::make_anchor(i, {0, 0}, {0, 1}, testing::random_limit(rng));
  }
  std::vector<ForceLogEntry> log;
  for (int k = 0; k <= 50; ++k) {
    ForceLogEntry e;
    e.time = k;
    const double psi = 1.5 * (1.0 - k / 50.0);
    for (int a = 0; a < 4; ++a) {
      e.force[a] = 0.8 * anchors[a].limit.mu_minor;
      e.angle[a] = 0.5 * kPi - psi;
    }
    log.push_back(e);
  }
  const ForceLogAnalysis out = analyze_force_log(log, anchors);
  for (std::size_t k = 1; k < out.probability.size(); ++k) {
    for (int a = 0; a < 4; ++a) EXPECT_GE(out.probability[k][a], out.probability[k - 1][a] - 1e-15);
  }
}

TEST(ForceLogTest, IntoTheWallIsFlagged) {
  std::array<Anchor, 4> anchors;
  for (int i = 0; i < 4; ++i) anchors[i] = testing::make_anchor(i, {0, 0}, {0, 1});
  ForceLogEntry e;
  e.angle = {-0.5 * kPi, 0.5 * kPi, 0.5 * kPi, 0.5 * kPi};
  e.force = {1, 1, 1, 1};
  const std::array<ForceLogEntry, 1> log{e};
  const ForceLogAnalysis out = analyze_force_log(log, anchors);
  EXPECT_TRUE(out.out_of_surface[0][0]);
  EXPECT_EQ(out.probability[0][0], 0.0);
  EXPECT_FALSE(out.out_of_surface[0][1]);
}

TEST(ForceLogTest, RejectsNonIncreasingTime) {
  std::array<Anchor, 4> anchors;
  for (int i = 0; i < 4; ++i) anchors[i] = testing::make_anchor(i, {0, 0}, {0, 1});
  std::vector<ForceLogEntry> log(2);
  for (auto& e : log) e.angle.fill(0.5 * kPi);
  EXPECT_THROW(analyze_force_log(log, anchors), std::invalid_argument);
}

TEST(ForceLogTest, ReplayOfTrajectoryMatchesStepProbabilities) {
  const Environment env = testing::square_box();
  const RobotModel robot;
  ScpConfig scp;
  scp.N = 8;
  Stance s;
  s.anchor_ids = {2, 3, 1, 0};
  const Trajectory t = seed_body_trajectory(TrajState::at_rest({0.95, 1.0, 0.0}),
                                            TrajState::at_rest({1.1, 1.05, 0.1}), s, env, robot,
                                            PlannerConfig{}, scp);
  std::array<Anchor, 4> anchors;
  for (int i = 0; i < 4; ++i) anchors[i] = env.anchor(*s.anchor_ids[i]);
  std::vector<ForceLogEntry> log;
  for (int k = 0; k < t.size(); ++k) {
    ForceLogEntry e;
    e.time = k * t.dt;
    for (int i = 0; i < 4; ++i) {
      const Vec2 d = robot.shoulder_world(t.states[k].pose, i) - anchors[i].position;
      e.force[i] = *t.controls[k].boom_forces[i];
      e.angle[i] = std::atan2(d.y(), d.x());
    }
    log.push_back(e);
  }
  const ForceLogAnalysis out = analyze_force_log(log, anchors);
  for (int k = 0; k < t.size(); ++k) {
    const StepGrasps g = evaluate_step(t, k, env, robot);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(out.probability[k][i], std::exp(*g.log_prob[i]), 1e-9);
      EXPECT_NEAR(out.psi[k][i], *g.psi[i], 1e-9);
    }
  }
}

TEST(TrialTest, CorridorEndpoints) {
  Environment env;
  env.bounds.min = Vec2(0, -0.5);
  env.bounds.max = Vec2(3, 2.5);
  const auto [start, goal] = corridor_endpoints(env);
  EXPECT_NEAR(start.x(), 0.8, 1e-15);
  EXPECT_NEAR(goal.x(), 2.2, 1e-15);
  EXPECT_NEAR(start.y(), 1.0, 1e-15);
}

TEST(TrialTest, RunTrialsIsDeterministicAcrossThreadCounts) {
  TrialConfig cfg;
  cfg.envgen.length = {2.2, 2.4};
  cfg.scp.N = 6;
  cfg.scp.max_iters = 5;
  cfg.mc_samples = 200;
  cfg.threads = 1;
  int observed = 0;
  const auto a = run_trials(2, cfg, 77, [&](int, const Environment&, const PlanResult*) { ++observed; });
  cfg.threads = 2;
  const auto b = run_trials(2, cfg, 77);
  ASSERT_EQ(a.size(), 4u);
  ASSERT_EQ(b.size(), 4u);
  EXPECT_EQ(observed, 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].trial, static_cast<int>(i / 2));
    EXPECT_EQ(a[i].planner, i % 2 ? PlannerKind::naive : PlannerKind::rbp);
    EXPECT_EQ(a[i].trial, b[i].trial);
    EXPECT_EQ(a[i].env_seed, derive_seed(77, 1, a[i].trial));
    EXPECT_EQ(a[i].plan_found, b[i].plan_found);
    EXPECT_EQ(a[i].transitions, b[i].transitions);
    EXPECT_EQ(a[i].analytic_log_prob, b[i].analytic_log_prob);
    EXPECT_EQ(a[i].mc_success_rate, b[i].mc_success_rate);
    EXPECT_EQ(a[i].note, b[i].note);
    EXPECT_GE(a[i].mc_success_rate, 0.0);
    EXPECT_LE(a[i].mc_success_rate, 1.0);
    for (const auto& [k, v] : a[i].timings) EXPECT_GE(v, 0.0) << k;
  }
}

}  // namespace
}  // namespace stochgrasp
