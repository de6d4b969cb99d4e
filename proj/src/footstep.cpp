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

#include "stochgrasp/footstep.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <tuple>

#include "stochgrasp/normal.hpp"

namespace stochgrasp {

void FootstepPlan::validate() const {
  if (stances.empty()) throw ContractError("footstep plan without stances");
  const std::size_t n = stances.size() - 1;
  if (transition_witness_poses.size() != n || moving_boom_indices.size() != n) {
    throw ContractError("footstep plan: list lengths disagree");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!stances[i].is_four() || !stances[i + 1].is_four() ||
        differing_slot(stances[i], stances[i + 1]) != moving_boom_indices[i]) {
      throw ContractError("footstep plan: transition " + std::to_string(i) + " is not a regrasp");
    }
  }
}

std::optional<PoseSearchResult> TransitionCache::check(const Stance& from, const Stance& to,
                                                       const RobotModel& robot,
                                                       const Environment& env,
                                                       const PlannerConfig& config,
                                                       SearchMode mode, FootstepStats* stats) {
  auto& memo = mode == SearchMode::robust ? robust_ : kinematic_;
  const auto key = std::minmax(from, to);
  auto it = memo.find(key);
  if (it != memo.end()) {
    if (stats) ++stats->cache_hits;
    return it->second;
  }
  if (stats) ++stats->transition_checks;
  auto result = transition_feasible(from, to, robot, env, config, mode);
  memo.emplace(key, result);
  return result;
}

std::vector<std::pair<int, int>> stance_neighbors(const Stance& stance, const Environment& env,
                                                  const RobotModel& robot,
                                                  const PlannerConfig& config) {
  const Vec2 c = stance.centroid(env);
  const double reach = 2.0 * robot.b_max;
  std::vector<std::pair<int, int>> out;
  for (int slot = 0; slot < kNumBooms; ++slot) {
    const Vec2 old = env.anchor(*stance.anchor_ids[slot]).position;
    std::vector<std::pair<double, int>> cands;
    for (const auto& a : env.anchors) {
      if (std::find(stance.anchor_ids.begin(), stance.anchor_ids.end(), a.id) !=
          stance.anchor_ids.end()) {
        continue;
      }
      const double d = (a.position - c).norm();
      // One shoulder reaches both the old and the new anchor.
      if (d > reach || (a.position - old).norm() > reach) continue;
      cands.emplace_back(d, a.id);
    }
    std::sort(cands.begin(), cands.end());
    if (static_cast<int>(cands.size()) > config.neighbor_cap) cands.resize(config.neighbor_cap);
    for (const auto& [d, id] : cands) out.emplace_back(slot, id);
  }
  return out;
}

double footstep_heuristic(const Stance& stance, const Vec2& goal, const Environment& env,
                          const RobotModel& robot, const PlannerConfig& config) {
  const double d = (stance.centroid(env) - goal).norm() - config.goal_tolerance;
  return std::max(0.0, d) / (0.5 * robot.b_max);
}

namespace {

bool at_goal(const Stance& s, const Vec2& goal, const Environment& env,
             const PlannerConfig& config) {
  return (s.centroid(env) - goal).norm() <= config.goal_tolerance;
}

void check_start(const Stance& start, const Environment& env) {
  if (!start.is_four()) throw ContractError("start stance must attach all four booms");
  start.resolve(env);
}

}  // namespace

std::optional<FootstepPlan> plan_footsteps(const Stance& start, const Vec2& goal,
                                           const Environment& env, const RobotModel& robot,
                                           const PlannerConfig& config, FootstepStats* stats,
                                           TransitionCache* cache) {
  config.validate();
  check_start(start, env);
  TransitionCache local;
  if (cache == nullptr) cache = &local;

  const std::array<Wrench, 1> none{Wrench::Zero()};
  const auto start_pose = find_feasible_pose(start, none, std::nullopt, robot, env, config);
  if (!start_pose) return std::nullopt;

  struct Node {
    StanceNode sn;
    int g;
    int parent;
    int moved_slot;
  };
  std::vector<Node> nodes{{{start, start_pose->pose}, 0, -1, -1}};
  std::map<Stance, int> index{{start, 0}};
  std::vector<bool> closed{false};

  // (f, g, insertion counter, node); smallest first.
  using Entry = std::tuple<double, int, long, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  long counter = 0;
  open.emplace(footstep_heuristic(start, goal, env, robot, config), 0, counter++, 0);

  int expanded = 0;
  while (!open.empty()) {
    const auto [f, g, cnt, id] = open.top();
    open.pop();
    (void)f;
    (void)cnt;
    if (closed[id] || g > nodes[id].g) continue;
    closed[id] = true;
    const Stance cur = nodes[id].sn.stance;
    if (stats) stats->closest = std::min(stats->closest, (cur.centroid(env) - goal).norm());

    if (at_goal(cur, goal, env, config)) {
      FootstepPlan plan;
      plan.start_pose = start_pose->pose;
      for (int n = id; n >= 0; n = nodes[n].parent) {
        plan.stances.push_back(nodes[n].sn.stance);
        if (nodes[n].parent >= 0) {
          plan.transition_witness_poses.push_back(*nodes[n].sn.cached_pose);
          plan.moving_boom_indices.push_back(nodes[n].moved_slot);
        }
      }
      std::reverse(plan.stances.begin(), plan.stances.end());
      std::reverse(plan.transition_witness_poses.begin(), plan.transition_witness_poses.end());
      std::reverse(plan.moving_boom_indices.begin(), plan.moving_boom_indices.end());
      plan.est_success_log_prob = plan_success_log_prob(plan, env, robot);
      if (stats) stats->expanded = expanded;
      return plan;
    }
    if (++expanded > config.node_budget) break;

    for (const auto& [slot, anchor_id] : stance_neighbors(cur, env, robot, config)) {
      const Stance next = cur.with(slot, anchor_id);
      auto found = index.find(next);
      const int ng = nodes[id].g + 1;
      if (found != index.end() && (closed[found->second] || nodes[found->second].g <= ng)) {
        continue;
      }
      const auto witness = cache->check(cur, next, robot, env, config, SearchMode::robust, stats);
      if (!witness) continue;
      int nid;
      if (found == index.end()) {
        nid = static_cast<int>(nodes.size());
        nodes.push_back({{next, witness->pose}, ng, id, slot});
        index.emplace(next, nid);
        closed.push_back(false);
      } else {
        nid = found->second;
        nodes[nid] = {{next, witness->pose}, ng, id, slot};
      }
      open.emplace(ng + footstep_heuristic(next, goal, env, robot, config), ng, counter++, nid);
    }
  }
  if (stats) stats->expanded = expanded;
  return std::nullopt;
}

std::optional<FootstepPlan> plan_footsteps_naive(const Stance& start, const Vec2& goal,
                                                 const Environment& env, const RobotModel& robot,
                                                 const PlannerConfig& config,
                                                 FootstepStats* stats) {
  config.validate();
  check_start(start, env);
  const std::array<Wrench, 1> none{Wrench::Zero()};
  const auto start_pose =
      find_feasible_pose(start, none, std::nullopt, robot, env, config, SearchMode::kinematic);
  if (!start_pose) return std::nullopt;

  FootstepPlan plan;
  plan.start_pose = start_pose->pose;
  plan.stances.push_back(start);
  std::set<Stance> visited{start};
  TransitionCache cache;
  int steps = 0;
  while (!at_goal(plan.stances.back(), goal, env, config)) {
    if (++steps > config.node_budget) return std::nullopt;
    const Stance cur = plan.stances.back();
    if (stats) stats->closest = std::min(stats->closest, (cur.centroid(env) - goal).norm());
    const double here = (cur.centroid(env) - goal).norm();
    std::vector<std::tuple<double, int, int>> ranked;
    for (const auto& [slot, anchor_id] : stance_neighbors(cur, env, robot, config)) {
      const Stance next = cur.with(slot, anchor_id);
      if (visited.count(next)) continue;
      const double d = (next.centroid(env) - goal).norm();
      if (d < here) ranked.emplace_back(d, slot, anchor_id);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return std::get<0>(a) < std::get<0>(b);
    });
    bool moved = false;
    for (const auto& [d, slot, anchor_id] : ranked) {
      const Stance next = cur.with(slot, anchor_id);
      const auto witness =
          cache.check(cur, next, robot, env, config, SearchMode::kinematic, stats);
      if (!witness) continue;
      plan.stances.push_back(next);
      plan.transition_witness_poses.push_back(witness->pose);
      plan.moving_boom_indices.push_back(slot);
      visited.insert(next);
      moved = true;
      break;
    }
    if (!moved) return std::nullopt;
  }
  if (stats) stats->expanded = steps;
  plan.est_success_log_prob = plan_success_log_prob(plan, env, robot);
  return plan;
}

// ---------------------------------------------------------------- episodes

double GraspEpisode::min_margin() const {
  if (out_of_surface) return kNegInf;
  double z = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < force.size(); ++t) z = std::min(z, (mu[t] - force[t]) / sigma[t]);
  return z;
}

std::vector<GraspEpisode> build_episodes(std::span<const GraspConfiguration> configs,
                                         const Environment& env, const RobotModel& robot) {
  std::vector<GraspEpisode> episodes;
  std::array<int, kNumBooms> open{-1, -1, -1, -1};
  for (const auto& c : configs) {
    for (int slot = 0; slot < kNumBooms; ++slot) {
      if (!c.anchor_ids[slot]) {
        open[slot] = -1;
        continue;
      }
      const int id = *c.anchor_ids[slot];
      if (open[slot] < 0 || episodes[open[slot]].anchor_id != id) {
        open[slot] = static_cast<int>(episodes.size());
        episodes.push_back(GraspEpisode{slot, id, {}, {}, {}, false});
      }
      GraspEpisode& ep = episodes[open[slot]];
      const Anchor& a = env.anchor(id);
      const Vec2 shoulder = robot.shoulder_world(c.pose, slot);
      const double psi = pull_angle(a, shoulder);
      if (std::abs(psi) > 0.5 * kPi) {
        ep.out_of_surface = true;
        continue;
      }
      const MuSigma ms = mu_sigma(a.limit, psi);
      ep.mu.push_back(ms.mu);
      ep.sigma.push_back(ms.sigma);
      ep.force.push_back(c.forces[slot]);
    }
  }
  return episodes;
}

std::vector<GraspConfiguration> witness_configurations(const FootstepPlan& plan,
                                                       const Environment& env,
                                                       const RobotModel& robot) {
  plan.validate();
  std::vector<GraspConfiguration> out;
  auto add = [&](const Pose& pose, const HoldCondition& cond) {
    GraspConfiguration c;
    c.pose = pose;
    c.anchor_ids = cond.stance.anchor_ids;
    const auto alloc =
        allocate_forces(pose, cond.stance, cond.external(pose, robot, env.gravity), robot, env);
    int k = 0;
    for (int slot = 0; slot < kNumBooms; ++slot) {
      if (!c.anchor_ids[slot]) continue;
      c.forces[slot] = alloc ? alloc->forces(k++) : std::numeric_limits<double>::infinity();
    }
    out.push_back(c);
  };
  add(plan.start_pose, HoldCondition{plan.stances.front(), std::nullopt, Wrench::Zero()});
  for (int i = 0; i < plan.transitions(); ++i) {
    const auto conds = transition_conditions(plan.stances[i], plan.stances[i + 1], env);
    const Pose& w = plan.transition_witness_poses[i];
    for (int k : {0, 2, 3, 1}) add(w, conds[k]);
  }
  return out;
}

double plan_success_log_prob(std::span<const GraspConfiguration> configs, const Environment& env,
                             const RobotModel& robot) {
  double total = 0.0;
  for (const auto& ep : build_episodes(configs, env, robot)) {
    total += log_normal_cdf(ep.min_margin());
  }
  return total;
}

double plan_success_log_prob(const FootstepPlan& plan, const Environment& env,
                             const RobotModel& robot) {
  return plan_success_log_prob(witness_configurations(plan, env, robot), env, robot);
}

std::optional<std::pair<Stance, Pose>> find_start_stance(const Vec2& target,
                                                         const Environment& env,
                                                         const RobotModel& robot,
                                                         const PlannerConfig& config) {
  std::vector<Vec2> centers;
  for (double dx : {0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 1.0, -1.0}) {
    for (double dy : {0.0, 0.25, -0.25}) centers.push_back(target + Vec2(dx, dy));
  }
  std::set<Stance> tried;
  for (const Vec2& c : centers) {
    const Pose pose{c.x(), c.y(), 0.0};
    Stance s;
    for (int slot = 0; slot < kNumBooms; ++slot) {
      const Vec2 shoulder = robot.shoulder_world(pose, slot);
      const double nominal = robot.shoulder_equilibrium_angles[slot];
      double best = std::numeric_limits<double>::infinity();
      for (const auto& a : env.anchors) {
        if (std::find(s.anchor_ids.begin(), s.anchor_ids.end(), a.id) != s.anchor_ids.end()) {
          continue;
        }
        const Vec2 d = a.position - shoulder;
        const double len = d.norm();
        if (len < robot.b_min || len > 0.95 * robot.b_max) continue;
        const double dev = std::abs(wrap_angle(std::atan2(d.y(), d.x()) - nominal));
        if (dev > robot.theta_max || dev >= best) continue;
        best = dev;
        s.anchor_ids[slot] = a.id;
      }
      if (!s.anchor_ids[slot]) break;
    }
    if (!s.is_four() || !tried.insert(s).second) continue;
    const std::array<Wrench, 1> none{Wrench::Zero()};
    if (auto r = find_feasible_pose(s, none, pose, robot, env, config)) {
      return std::make_pair(s, r->pose);
    }
  }
  return std::nullopt;
}

}  // namespace stochgrasp
