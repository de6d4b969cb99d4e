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

// Static feasibility of poses and stance transitions.
//
// A pose is feasible for a stance when every attached boom is within its
// length and shoulder-angle limits, nothing collides, and some tension
// allocation holds the body in equilibrium with robustness >= r_min. A
// transition between two 4-stances that differ in one slot is feasible when
// a single pose satisfies both 4-stances and the shared 3-stance with the
// detached gripper hanging at either anchor.

#ifndef STOCHGRASP_FEASIBILITY_HPP_
#define STOCHGRASP_FEASIBILITY_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochgrasp/env.hpp"
#include "stochgrasp/robot.hpp"

namespace stochgrasp {

struct Stance {
  std::array<std::optional<int>, kNumBooms> anchor_ids;

  int attached_count() const;
  bool is_four() const { return attached_count() == 4; }
  // Slot of the single detached boom of a 3-stance.
  std::optional<int> free_slot() const;
  Stance without(int slot) const;
  Stance with(int slot, int anchor_id) const;
  // Throws ContractError on repeated ids or unknown anchors.
  AnchorSlots resolve(const Environment& env) const;
  // Centroid of the attached anchors.
  Vec2 centroid(const Environment& env) const;
  std::string to_string() const;

  auto operator<=>(const Stance&) const = default;
  bool operator==(const Stance&) const = default;
};

// Index of the only slot in which a and b differ, or -1.
int differing_slot(const Stance& a, const Stance& b);

struct PlannerConfig {
  double r_min = std::log(0.95);
  int pose_samples = 200;
  int local_opt_iters = 60;
  Vec3 perturbation_std = Vec3(0.05, 0.05, 0.05);
  std::uint64_t rng_seed = 1;
  double sample_inflation = 0.5;
  double sample_phi_range = 0.25 * kPi;
  int seed_samples = 50;
  double goal_tolerance = 0.5;
  int neighbor_cap = 20;
  int node_budget = 400;

  void validate() const;
};

enum class FailureReason { none, kinematic, collision, no_robust_allocation };

const char* to_string(FailureReason r);

struct FeasibilityReport {
  bool feasible = false;
  std::optional<Pose> best_pose;
  std::optional<Eigen::VectorXd> best_forces;
  std::optional<double> robustness;
  FailureReason failure_reason = FailureReason::none;
};

struct Allocation {
  Eigen::VectorXd forces;  // attached slots in slot order
  double robustness = kNegInf;
};

// Most robust tension allocation holding `pose` in static equilibrium
// under gravity and `external`. Empty when no allocation within the force
// limits balances the load, or when the wrench matrix is rank deficient.
std::optional<Allocation> allocate_forces(const Pose& pose, const Stance& stance,
                                          const Wrench& external, const RobotModel& robot,
                                          const Environment& env);

// Same problem from precomputed geometry; `anchors` gives the limits.
std::optional<Allocation> allocate_forces(const Pose& pose, const StanceGeometry& geometry,
                                          const AnchorSlots& anchors, const Wrench& external,
                                          const RobotModel& robot, const Vec2& gravity);

// One static hold requirement. When `free_end` is set the stance must be a
// 3-stance and the detached gripper hangs at that point.
struct HoldCondition {
  Stance stance;
  std::optional<Vec2> free_end;
  Wrench extra = Wrench::Zero();

  Wrench external(const Pose& pose, const RobotModel& robot, const Vec2& gravity) const;
};

FeasibilityReport pose_feasible(const Pose& pose, const Stance& stance, const Wrench& external,
                                const RobotModel& robot, const Environment& env,
                                const PlannerConfig& config);

// Feasible under every condition; robustness is the minimum across them.
FeasibilityReport pose_feasible(const Pose& pose, std::span<const HoldCondition> conditions,
                                const RobotModel& robot, const Environment& env,
                                const PlannerConfig& config);

// `robust` gates on r_min; `kinematic` only on reach, collision and the
// existence of an in-limit equilibrium allocation.
enum class SearchMode { robust, kinematic };

struct PoseSearchResult {
  Pose pose;
  double robustness = kNegInf;  // minimum over conditions
};

// Random sampling over the anchors' bounding box followed by compass search
// on the minimum robustness. Deterministic in config.rng_seed.
std::optional<PoseSearchResult> find_feasible_pose(std::span<const HoldCondition> conditions,
                                                   const std::optional<Pose>& seed_pose,
                                                   const RobotModel& robot,
                                                   const Environment& env,
                                                   const PlannerConfig& config,
                                                   SearchMode mode = SearchMode::robust);

std::optional<PoseSearchResult> find_feasible_pose(const Stance& stance,
                                                   std::span<const Wrench> external_wrenches,
                                                   const std::optional<Pose>& seed_pose,
                                                   const RobotModel& robot,
                                                   const Environment& env,
                                                   const PlannerConfig& config,
                                                   SearchMode mode = SearchMode::robust);

// The four hold conditions of a transition: from, to, and the common
// 3-stance with the gripper at the old and at the new anchor.
std::vector<HoldCondition> transition_conditions(const Stance& from, const Stance& to,
                                                 const Environment& env);

// Throws ContractError unless from/to are 4-stances differing in one slot.
// The sampling stream depends on the unordered pair, so the result is
// symmetric in (from, to).
std::optional<PoseSearchResult> transition_feasible(const Stance& from, const Stance& to,
                                                    const RobotModel& robot,
                                                    const Environment& env,
                                                    const PlannerConfig& config,
                                                    SearchMode mode = SearchMode::robust);

}  // namespace stochgrasp

#endif  // STOCHGRASP_FEASIBILITY_HPP_
