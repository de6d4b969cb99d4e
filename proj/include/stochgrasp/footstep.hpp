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

// Footstep planning over the stance graph.
//
// Vertices are 4-stances; an edge reassigns one boom and exists only when a
// single witness pose holds the old stance, the new stance and the shared
// 3-stance with the free gripper at either end of its swing.

#ifndef STOCHGRASP_FOOTSTEP_HPP_
#define STOCHGRASP_FOOTSTEP_HPP_

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stochgrasp/feasibility.hpp"

namespace stochgrasp {

struct StanceNode {
  Stance stance;
  std::optional<Pose> cached_pose;
};

struct FootstepPlan {
  std::vector<Stance> stances;
  Pose start_pose;  // feasible pose for stances.front()
  std::vector<Pose> transition_witness_poses;
  std::vector<int> moving_boom_indices;
  double est_success_log_prob = 0.0;

  int transitions() const { return static_cast<int>(transition_witness_poses.size()); }
  // Throws ContractError when consecutive stances do not differ in exactly
  // the recorded slot or the list lengths disagree.
  void validate() const;
};

struct FootstepStats {
  int expanded = 0;
  int transition_checks = 0;
  int cache_hits = 0;
  double closest = std::numeric_limits<double>::infinity();  // centroid-goal distance
};

// Memo of transition checks keyed by the unordered stance pair. Robust and
// kinematic results live in separate caches.
class TransitionCache {
 public:
  std::optional<PoseSearchResult> check(const Stance& from, const Stance& to,
                                        const RobotModel& robot, const Environment& env,
                                        const PlannerConfig& config, SearchMode mode,
                                        FootstepStats* stats);

 private:
  std::map<std::pair<Stance, Stance>, std::optional<PoseSearchResult>> robust_, kinematic_;
};

// Candidate (slot, anchor) reassignments of a 4-stance, per slot
// nearest-first to the centroid and capped at config.neighbor_cap.
std::vector<std::pair<int, int>> stance_neighbors(const Stance& stance, const Environment& env,
                                                  const RobotModel& robot,
                                                  const PlannerConfig& config);

// Lower bound on the transitions needed to bring the centroid within the
// goal tolerance: one transition moves one anchor by at most 2 b_max, so
// the centroid moves by at most b_max / 2.
double footstep_heuristic(const Stance& stance, const Vec2& goal, const Environment& env,
                          const RobotModel& robot, const PlannerConfig& config);

// A* with unit edge cost over lazily generated, feasibility-gated edges.
// Empty when the start stance admits no robust pose or the goal is not
// reached within config.node_budget expansions.
std::optional<FootstepPlan> plan_footsteps(const Stance& start, const Vec2& goal,
                                           const Environment& env, const RobotModel& robot,
                                           const PlannerConfig& config,
                                           FootstepStats* stats = nullptr,
                                           TransitionCache* cache = nullptr);

// Greedy baseline: repeatedly take the unvisited reassignment that brings
// the centroid closest to the goal, among those that bring it closer at
// all. Edges are gated only on reach, collision and existence of an
// in-limit allocation; no backtracking.
std::optional<FootstepPlan> plan_footsteps_naive(const Stance& start, const Vec2& goal,
                                                 const Environment& env, const RobotModel& robot,
                                                 const PlannerConfig& config,
                                                 FootstepStats* stats = nullptr);

// One instant of a plan: which anchor each slot holds and with what force.
struct GraspConfiguration {
  Pose pose;
  std::array<std::optional<int>, kNumBooms> anchor_ids;
  std::array<double, kNumBooms> forces{};
};

// The per-grasp limit distribution and applied force across one episode:
// a slot holding one anchor without interruption.
struct GraspEpisode {
  int slot = 0;
  int anchor_id = 0;
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<double> force;
  bool out_of_surface = false;

  // Minimum standardized margin (mu - f) / sigma; -inf when out of surface.
  double min_margin() const;
};

std::vector<GraspEpisode> build_episodes(std::span<const GraspConfiguration> configs,
                                         const Environment& env, const RobotModel& robot);

// Configurations visited by a plan executed at its witness poses: start
// pose, then per transition the four hold conditions in execution order.
std::vector<GraspConfiguration> witness_configurations(const FootstepPlan& plan,
                                                       const Environment& env,
                                                       const RobotModel& robot);

// Sum over episodes of log Phi(min margin).
double plan_success_log_prob(std::span<const GraspConfiguration> configs, const Environment& env,
                             const RobotModel& robot);
double plan_success_log_prob(const FootstepPlan& plan, const Environment& env,
                             const RobotModel& robot);

// A 4-stance near `target` admitting a robust pose, found by assigning each
// slot the anchor closest to its nominal direction. Empty if none.
std::optional<std::pair<Stance, Pose>> find_start_stance(const Vec2& target,
                                                         const Environment& env,
                                                         const RobotModel& robot,
                                                         const PlannerConfig& config);

}  // namespace stochgrasp

#endif  // STOCHGRASP_FOOTSTEP_HPP_
