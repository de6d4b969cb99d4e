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

#include "stochgrasp/feasibility.hpp"

#include <algorithm>
#include <sstream>

#include "stochgrasp/normal.hpp"
#include "stochgrasp/rng.hpp"

namespace stochgrasp {

// ---------------------------------------------------------------- Stance

int Stance::attached_count() const {
  int k = 0;
  for (const auto& id : anchor_ids) k += id.has_value();
  return k;
}

std::optional<int> Stance::free_slot() const {
  if (attached_count() != kNumBooms - 1) return std::nullopt;
  for (int i = 0; i < kNumBooms; ++i) {
    if (!anchor_ids[i]) return i;
  }
  return std::nullopt;
}

Stance Stance::without(int slot) const {
  Stance s = *this;
  s.anchor_ids[slot].reset();
  return s;
}

Stance Stance::with(int slot, int anchor_id) const {
  Stance s = *this;
  s.anchor_ids[slot] = anchor_id;
  return s;
}

AnchorSlots Stance::resolve(const Environment& env) const {
  AnchorSlots slots{};
  for (int i = 0; i < kNumBooms; ++i) {
    if (!anchor_ids[i]) continue;
    for (int j = 0; j < i; ++j) {
      if (anchor_ids[j] == anchor_ids[i]) {
        throw ContractError("stance " + to_string() + " repeats an anchor");
      }
    }
    slots[i] = env.find_anchor(*anchor_ids[i]);
    if (slots[i] == nullptr) {
      throw ContractError("stance references unknown anchor " + std::to_string(*anchor_ids[i]));
    }
  }
  return slots;
}

Vec2 Stance::centroid(const Environment& env) const {
  Vec2 c = Vec2::Zero();
  int k = 0;
  for (const auto& id : anchor_ids) {
    if (!id) continue;
    c += env.anchor(*id).position;
    ++k;
  }
  return k > 0 ? Vec2(c / k) : c;
}

std::string Stance::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < kNumBooms; ++i) {
    if (i) os << ',';
    if (anchor_ids[i]) {
      os << *anchor_ids[i];
    } else {
      os << '-';
    }
  }
  return os.str();
}

int differing_slot(const Stance& a, const Stance& b) {
  int slot = -1;
  for (int i = 0; i < kNumBooms; ++i) {
    if (a.anchor_ids[i] != b.anchor_ids[i]) {
      if (slot >= 0) return -1;
      slot = i;
    }
  }
  return slot;
}

void PlannerConfig::validate() const {
  if (!(r_min < 0.0)) throw ConfigError("planner: r_min must be negative");
  if (pose_samples <= 0 || local_opt_iters < 0 || seed_samples <= 0 || neighbor_cap <= 0 ||
      node_budget <= 0) {
    throw ConfigError("planner: counts must be positive");
  }
  if ((perturbation_std.array() < 0.0).any()) {
    throw ConfigError("planner: perturbation_std must be non-negative");
  }
  if (!(goal_tolerance > 0.0)) throw ConfigError("planner: goal_tolerance must be positive");
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::none: return "none";
    case FailureReason::kinematic: return "kinematic";
    case FailureReason::collision: return "collision";
    case FailureReason::no_robust_allocation: return "no_robust_allocation";
  }
  return "unknown";
}

Wrench HoldCondition::external(const Pose& pose, const RobotModel& robot,
                               const Vec2& gravity) const {
  Wrench w = extra;
  if (free_end) w += cantilever_wrench(pose, robot, *free_end, gravity);
  return w;
}

// ---------------------------------------------------------------- allocation

namespace {

constexpr double kEquilibriumTol = 1e-6;

struct Term {
  double mu, sigma;
  bool active;
};

// Maximizes sum_i log Phi((mu_i - f_i) / sigma_i) along f = fp + t * n.
double maximize_along_line(const Eigen::VectorXd& fp, const Eigen::VectorXd& n,
                           const std::vector<Term>& terms, double lo, double hi) {
  auto derivs = [&](double t, double* d1, double* d2) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (!terms[i].active || n(i) == 0.0) continue;
      const double z = (terms[i].mu - fp(i) - t * n(i)) / terms[i].sigma;
      const double s = n(i) / terms[i].sigma;
      a -= normal_hazard(z) * s;
      b += log_normal_cdf_second(z) * s * s;
    }
    *d1 = a;
    *d2 = b;
  };
  double d1, d2;
  derivs(lo, &d1, &d2);
  if (d1 <= 0.0) return lo;
  derivs(hi, &d1, &d2);
  if (d1 >= 0.0) return hi;
  // Safeguarded Newton on the strictly decreasing derivative.
  double a = lo, b = hi;
  double t = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    derivs(t, &d1, &d2);
    if (d1 > 0.0) {
      a = t;
    } else {
      b = t;
    }
    double next = d2 < 0.0 ? t - d1 / d2 : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - t) <= 1e-14 * (1.0 + std::abs(t)) || b - a <= 1e-14 * (1.0 + std::abs(t))) {
      return next;
    }
    t = next;
  }
  return t;
}

}  // namespace

std::optional<Allocation> allocate_forces(const Pose& pose, const StanceGeometry& geometry,
                                          const AnchorSlots& anchors, const Wrench& external,
                                          const RobotModel& robot, const Vec2& gravity) {
  std::vector<Term> terms;
  Eigen::Matrix<double, 3, Eigen::Dynamic> w(3, 0);
  bool out_of_surface = false;
  for (int i = 0; i < kNumBooms; ++i) {
    if (!geometry[i]) continue;
    const BoomGeometry& g = *geometry[i];
    w.conservativeResize(3, w.cols() + 1);
    const Vec2 r = g.shoulder_world - pose.position();
    w.col(w.cols() - 1) << g.unit.x(), g.unit.y(), cross2(r, g.unit);
    if (std::abs(g.psi) > 0.5 * kPi) {
      out_of_surface = true;
      terms.push_back({0.0, 1.0, false});
    } else {
      const MuSigma ms = mu_sigma(anchors[i]->limit, g.psi);
      terms.push_back({ms.mu, ms.sigma, true});
    }
  }
  const auto k = w.cols();
  if (k == 0) return std::nullopt;
  const Wrench target = -(gravity_wrench(robot, gravity) + external);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > tol;
  if (rank < std::min<Eigen::Index>(k, 3)) return std::nullopt;
  const int nullity = static_cast<int>(k) - rank;
  if (nullity > 1) return std::nullopt;

  const Eigen::VectorXd fp = w.completeOrthogonalDecomposition().solve(target);
  if ((w * fp - target).norm() > kEquilibriumTol) return std::nullopt;

  const double lo = robot.f_min;
  const double hi = robot.f_max;
  Eigen::VectorXd f = fp;
  if (nullity == 1) {
    const Eigen::VectorXd n = svd.matrixV().col(k - 1);
    double tlo = -std::numeric_limits<double>::infinity();
    double thi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < k; ++i) {
      if (std::abs(n(i)) < 1e-12) {
        if (fp(i) < lo - 1e-9 || fp(i) > hi + 1e-9) return std::nullopt;
        continue;
      }
      double a = (lo - fp(i)) / n(i);
      double b = (hi - fp(i)) / n(i);
      if (a > b) std::swap(a, b);
      tlo = std::max(tlo, a);
      thi = std::min(thi, b);
    }
    if (tlo > thi) {
      if (tlo - thi > 1e-9) return std::nullopt;
      thi = tlo;
    }
    f = fp + maximize_along_line(fp, n, terms, tlo, thi) * n;
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    if (f(i) < lo - 1e-9 || f(i) > hi + 1e-9) return std::nullopt;
    f(i) = std::clamp(f(i), lo, hi);
  }
  if ((w * f - target).norm() > kEquilibriumTol) return std::nullopt;

  Allocation out;
  out.forces = f;
  if (out_of_surface) {
    out.robustness = kNegInf;
  } else {
    double r = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      r += log_normal_cdf((terms[i].mu - f(i)) / terms[i].sigma);
    }
    out.robustness = r;
  }
  return out;
}

std::optional<Allocation> allocate_forces(const Pose& pose, const Stance& stance,
                                          const Wrench& external, const RobotModel& robot,
                                          const Environment& env) {
  const AnchorSlots slots = stance.resolve(env);
  return allocate_forces(pose, boom_geometry(pose, robot, slots), slots, external, robot,
                         env.gravity);
}

// ---------------------------------------------------------------- pose checks

namespace {

// Smallest total tension-bound violation over all equilibrium force
// vectors; 0 iff a bounded equilibrium exists. Degenerate wrench matrices
// score a fixed large value.
double allocation_violation(const Pose& pose, const StanceGeometry& geometry,
                            const Wrench& external, const RobotModel& robot, const Vec2& gravity) {
  constexpr double kDegenerate = 100.0;
  Eigen::Matrix<double, 3, Eigen::Dynamic> w(3, 0);
  for (const auto& g : geometry) {
    if (!g) continue;
    w.conservativeResize(3, w.cols() + 1);
    w.col(w.cols() - 1) << g->unit.x(), g->unit.y(), cross2(g->shoulder_world - pose.position(), g->unit);
  }
  const auto k = w.cols();
  if (k == 0) return kDegenerate;
  const Wrench target = -(gravity_wrench(robot, gravity) + external);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv(0));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > tol;
  const int nullity = static_cast<int>(k) - rank;
  if (rank < std::min<Eigen::Index>(k, 3) || nullity > 1) return kDegenerate;
  const Eigen::VectorXd fp = w.completeOrthogonalDecomposition().solve(target);
  const double residual = (w * fp - target).norm();
  auto bound_violation = [&](const Eigen::VectorXd& f) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      v += std::max(0.0, robot.f_min - f(i)) + std::max(0.0, f(i) - robot.f_max);
    }
    return v;
  };
  double best = bound_violation(fp);
  if (nullity == 1) {
    // Convex piecewise-linear in t; the minimum sits on a breakpoint.
    const Eigen::VectorXd n = svd.matrixV().col(k - 1);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (std::abs(n(i)) < 1e-12) continue;
      for (double b : {robot.f_min, robot.f_max}) {
        best = std::min(best, bound_violation(fp + (b - fp(i)) / n(i) * n));
      }
    }
  }
  return best + 10.0 * residual;
}

struct Prepared {
  AnchorSlots slots;
  const HoldCondition* condition;
};

// Search score tiers: kinematic violations < collisions < missing
// allocation < out-of-surface grasps < finite robustness.
constexpr double kKinematicTier = -1000.0;
constexpr double kCollisionTier = -500.0;
constexpr double kAllocationTier = -100.0;
constexpr double kSurfaceTier = -50.0;

// Maps a nonnegative violation into (bottom, top], decreasing.
double squash(double top, double bottom, double violation) {
  return top - (top - bottom) * (1.0 - std::exp(-violation / 10.0)) * 0.999;
}

struct Evaluation {
  double score = kKinematicTier;
  FailureReason reason = FailureReason::kinematic;
  double min_robustness = kNegInf;
  std::vector<std::optional<Allocation>> allocations;
};

Evaluation evaluate(const Pose& pose, const std::vector<Prepared>& conds, const RobotModel& robot,
                    const Environment& env, const PlannerConfig& config, SearchMode mode) {
  Evaluation ev;
  std::vector<StanceGeometry> geos;
  geos.reserve(conds.size());
  double violation = 0.0;
  for (const auto& c : conds) {
    try {
      geos.push_back(boom_geometry(pose, robot, c.slots));
    } catch (const GeometryError&) {
      ev.score = kKinematicTier - 1e4;
      return ev;
    }
    for (const auto& g : geos.back()) {
      if (!g) continue;
      violation += std::max(0.0, g->length - robot.b_max) + std::max(0.0, robot.b_min - g->length) +
                   std::max(0.0, std::abs(g->theta) - robot.theta_max);
    }
  }
  if (violation > 0.0) {
    ev.score = kKinematicTier - 10.0 * violation;
    return ev;
  }

  ev.reason = FailureReason::collision;
  ev.score = kCollisionTier;
  if (body_collides(pose, robot, env)) return ev;
  std::vector<std::pair<int, const Anchor*>> checked;
  for (std::size_t c = 0; c < conds.size(); ++c) {
    for (int i = 0; i < kNumBooms; ++i) {
      const Anchor* a = conds[c].slots[i];
      if (a == nullptr) continue;
      const std::pair<int, const Anchor*> key{i, a};
      if (std::find(checked.begin(), checked.end(), key) != checked.end()) continue;
      checked.push_back(key);
      if (segment_intersects_walls(geos[c][i]->shoulder_world, a->position, env)) return ev;
    }
  }

  ev.reason = FailureReason::no_robust_allocation;
  ev.score = kAllocationTier;
  double min_r = std::numeric_limits<double>::infinity();
  double tension_violation = 0.0;
  bool missing = false;
  for (std::size_t c = 0; c < conds.size(); ++c) {
    const Wrench ext = conds[c].condition->external(pose, robot, env.gravity);
    auto alloc = allocate_forces(pose, geos[c], conds[c].slots, ext, robot, env.gravity);
    if (!alloc) {
      missing = true;
      tension_violation += allocation_violation(pose, geos[c], ext, robot, env.gravity);
      continue;
    }
    min_r = std::min(min_r, alloc->robustness);
    ev.allocations.push_back(std::move(alloc));
  }
  if (missing) {
    ev.allocations.clear();
    ev.score = squash(kAllocationTier, kCollisionTier, tension_violation);
    return ev;
  }
  ev.min_robustness = min_r;
  if (mode == SearchMode::kinematic) {
    ev.score = 0.0;
    ev.reason = FailureReason::none;
    return ev;
  }
  if (min_r == kNegInf) {
    double excess = 0.0;
    for (const auto& g : geos) {
      for (const auto& b : g) {
        if (b) excess += std::max(0.0, std::abs(b->psi) - 0.5 * kPi);
      }
    }
    ev.score = squash(kSurfaceTier, kAllocationTier, excess);
    return ev;
  }
  // Finite robustness keeps its own value down to -40 and is squashed into
  // (-50, -40) below that, so deeper deficits still rank lower.
  constexpr double kSoftFloor = -40.0;
  ev.score = min_r >= kSoftFloor ? min_r : squash(kSoftFloor, kSurfaceTier, kSoftFloor - min_r);
  ev.reason = min_r >= config.r_min ? FailureReason::none : FailureReason::no_robust_allocation;
  return ev;
}

std::vector<Prepared> prepare(std::span<const HoldCondition> conditions, const Environment& env) {
  std::vector<Prepared> out;
  for (const auto& c : conditions) {
    if (c.free_end && !c.stance.free_slot()) {
      throw ContractError("hold condition with a free end needs a 3-stance");
    }
    out.push_back({c.stance.resolve(env), &c});
  }
  return out;
}

bool is_feasible(const Evaluation& ev) { return ev.reason == FailureReason::none; }

}  // namespace

FeasibilityReport pose_feasible(const Pose& pose, std::span<const HoldCondition> conditions,
                                const RobotModel& robot, const Environment& env,
                                const PlannerConfig& config) {
  const auto conds = prepare(conditions, env);
  const Evaluation ev = evaluate(pose, conds, robot, env, config, SearchMode::robust);
  FeasibilityReport rep;
  rep.failure_reason = ev.reason;
  rep.feasible = is_feasible(ev);
  if (!ev.allocations.empty()) {
    rep.robustness = ev.min_robustness;
    // Forces of the least robust condition.
    std::size_t worst = 0;
    for (std::size_t i = 0; i < ev.allocations.size(); ++i) {
      if (ev.allocations[i]->robustness < ev.allocations[worst]->robustness) worst = i;
    }
    rep.best_forces = ev.allocations[worst]->forces;
    rep.best_pose = pose;
  }
  if (!rep.feasible) {
    rep.best_pose.reset();
    rep.best_forces.reset();
    rep.robustness.reset();
  }
  return rep;
}

FeasibilityReport pose_feasible(const Pose& pose, const Stance& stance, const Wrench& external,
                                const RobotModel& robot, const Environment& env,
                                const PlannerConfig& config) {
  const HoldCondition c{stance, std::nullopt, external};
  return pose_feasible(pose, std::span<const HoldCondition>(&c, 1), robot, env, config);
}

// ---------------------------------------------------------------- search

std::optional<PoseSearchResult> find_feasible_pose(std::span<const HoldCondition> conditions,
                                                   const std::optional<Pose>& seed_pose,
                                                   const RobotModel& robot,
                                                   const Environment& env,
                                                   const PlannerConfig& config,
                                                   SearchMode mode) {
  if (conditions.empty()) return std::nullopt;
  const auto conds = prepare(conditions, env);

  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (const auto& c : conds) {
    for (const Anchor* a : c.slots) {
      if (a == nullptr) continue;
      lo = lo.cwiseMin(a->position);
      hi = hi.cwiseMax(a->position);
    }
    if (c.condition->free_end) {
      lo = lo.cwiseMin(*c.condition->free_end);
      hi = hi.cwiseMax(*c.condition->free_end);
    }
  }
  lo = (lo.array() - config.sample_inflation).matrix().cwiseMax(env.bounds.min);
  hi = (hi.array() + config.sample_inflation).matrix().cwiseMin(env.bounds.max);
  if ((lo.array() > hi.array()).any()) return std::nullopt;

  // Every attached anchor must be within reach of its shoulder, which
  // confines the body center to a box around each anchor.
  for (const auto& c : conds) {
    for (int i = 0; i < kNumBooms; ++i) {
      const Anchor* a = c.slots[i];
      if (a == nullptr) continue;
      const double reach = robot.b_max + robot.shoulder_offsets[i].norm();
      lo = lo.cwiseMax((a->position.array() - reach).matrix());
      hi = hi.cwiseMin((a->position.array() + reach).matrix());
    }
  }
  if ((lo.array() > hi.array()).any()) return std::nullopt;

  Rng rng(config.rng_seed);
  std::vector<Pose> candidates;
  if (seed_pose) candidates.push_back(*seed_pose);
  for (int i = 0; i < config.pose_samples; ++i) {
    Pose p;
    p.x = rng.uniform(lo.x(), hi.x());
    p.y = rng.uniform(lo.y(), hi.y());
    p.phi = rng.uniform(-config.sample_phi_range, config.sample_phi_range);
    candidates.push_back(p);
  }

  std::size_t best = 0;
  Evaluation best_ev;
  best_ev.score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    Evaluation ev = evaluate(candidates[i], conds, robot, env, config, mode);
    if (ev.score > best_ev.score + 1e-12) {
      best = i;
      best_ev = std::move(ev);
      if (mode == SearchMode::kinematic && is_feasible(best_ev)) break;
    }
  }

  Pose current = candidates[best];
  Evaluation current_ev = best_ev;
  const bool polish = !(mode == SearchMode::kinematic && is_feasible(current_ev));
  if (polish) {
    Vec3 step(0.1, 0.1, 0.1);
    for (int it = 0; it < config.local_opt_iters && step.maxCoeff() > 1e-3; ++it) {
      Pose best_move = current;
      Evaluation best_move_ev = current_ev;
      bool improved = false;
      for (int d = 0; d < 6; ++d) {
        Vec3 v = current.vec();
        v(d / 2) += (d % 2 == 0 ? 1.0 : -1.0) * step(d / 2);
        const Pose cand = Pose::from_vec(v);
        Evaluation ev = evaluate(cand, conds, robot, env, config, mode);
        if (ev.score > best_move_ev.score + 1e-12) {
          best_move = cand;
          best_move_ev = std::move(ev);
          improved = true;
        }
      }
      if (improved) {
        current = best_move;
        current_ev = std::move(best_move_ev);
        if (mode == SearchMode::kinematic && is_feasible(current_ev)) break;
      } else {
        step *= 0.5;
      }
    }
  }

  if (!is_feasible(current_ev)) return std::nullopt;
  return PoseSearchResult{current, current_ev.min_robustness};
}

std::optional<PoseSearchResult> find_feasible_pose(const Stance& stance,
                                                   std::span<const Wrench> external_wrenches,
                                                   const std::optional<Pose>& seed_pose,
                                                   const RobotModel& robot,
                                                   const Environment& env,
                                                   const PlannerConfig& config, SearchMode mode) {
  std::vector<HoldCondition> conds;
  for (const auto& w : external_wrenches) conds.push_back({stance, std::nullopt, w});
  if (conds.empty()) conds.push_back({stance, std::nullopt, Wrench::Zero()});
  return find_feasible_pose(conds, seed_pose, robot, env, config, mode);
}

std::vector<HoldCondition> transition_conditions(const Stance& from, const Stance& to,
                                                 const Environment& env) {
  const int slot = differing_slot(from, to);
  if (!from.is_four() || !to.is_four() || slot < 0) {
    throw ContractError("transition needs two 4-stances differing in exactly one slot: " +
                        from.to_string() + " -> " + to.to_string());
  }
  const Stance common = from.without(slot);
  const Vec2 old_end = env.anchor(*from.anchor_ids[slot]).position;
  const Vec2 new_end = env.anchor(*to.anchor_ids[slot]).position;
  return {HoldCondition{from, std::nullopt, Wrench::Zero()},
          HoldCondition{to, std::nullopt, Wrench::Zero()},
          HoldCondition{common, old_end, Wrench::Zero()},
          HoldCondition{common, new_end, Wrench::Zero()}};
}

namespace {

std::uint64_t stance_key(const Stance& s) {
  std::uint64_t k = 0x51a9c3ULL;
  for (const auto& id : s.anchor_ids) k = mix64(k ^ static_cast<std::uint64_t>(id ? *id + 1 : 0));
  return k;
}

}  // namespace

std::optional<PoseSearchResult> transition_feasible(const Stance& from, const Stance& to,
                                                    const RobotModel& robot,
                                                    const Environment& env,
                                                    const PlannerConfig& config,
                                                    SearchMode mode) {
  auto conds = transition_conditions(from, to, env);
  // Canonical order so that (from, to) and (to, from) see the same problem.
  if (to < from) std::swap(conds[0], conds[1]), std::swap(conds[2], conds[3]);
  const Stance& a = std::min(from, to);
  const Stance& b = std::max(from, to);
  PlannerConfig cfg = config;
  cfg.rng_seed = derive_seed(config.rng_seed, stance_key(a), stance_key(b));
  return find_feasible_pose(conds, std::nullopt, robot, env, cfg, mode);
}

}  // namespace stochgrasp
