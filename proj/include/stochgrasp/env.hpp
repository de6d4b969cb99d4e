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

#ifndef STOCHGRASP_ENV_HPP_
#define STOCHGRASP_ENV_HPP_

#include <cstdint>
#include <vector>

#include "stochgrasp/common.hpp"
#include "stochgrasp/grasp.hpp"
#include "stochgrasp/robot.hpp"

namespace stochgrasp {

// Anchors may sit exactly on a wall; contacts this close to a segment end
// are not collisions.
inline constexpr double kTouchTolerance = 1e-6;

struct Bounds {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();

  bool contains(const Vec2& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
  }
};

// A 2D cave. Walls are polylines oriented so that free space lies to their
// left; anchor normals are the left normals of their host segments.
struct Environment {
  std::vector<std::vector<Vec2>> walls;
  std::vector<Anchor> anchors;
  Bounds bounds;
  Vec2 gravity = Vec2(0.0, -3.71);
  std::uint64_t rng_seed = 0;

  // nullptr when absent.
  const Anchor* find_anchor(int id) const;
  // Throws std::out_of_range when absent.
  const Anchor& anchor(int id) const;
  // Throws ConfigError on broken invariants (non-unit normals, duplicate
  // ids, anchors off their walls, invalid limit surfaces).
  void validate() const;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct EnvGenConfig {
  Range length{3.0, 3.5};
  Range width{1.8, 2.2};
  double vertex_spacing = 1.0;
  double vertex_jitter = 0.1;
  double anchor_density = 3.0;  // anchors per meter of wall
  Range mu_major{15.0, 40.0};
  Range mu_minor{8.0, 25.0};
  Range sigma0{0.5, 2.0};
  Range sigma_slope{0.0, 1.5};
  Vec2 gravity = Vec2(0.0, -3.71);
  double bounds_margin = 0.5;

  void validate() const;
};

// Where the generator put each anchor: wall index, segment index and arc
// length along the wall.
struct AnchorPlacement {
  int wall = 0;
  int segment = 0;
  double arc_length = 0.0;
};

// Two-wall corridor with jittered vertices and uniformly placed anchors.
// Deterministic in (config, seed). Throws ConfigError on invalid config.
Environment generate_random_environment(const EnvGenConfig& config, std::uint64_t seed,
                                        std::vector<AnchorPlacement>* placements = nullptr);

// True iff p0-p1 crosses or touches any wall, ignoring contacts within
// kTouchTolerance of p0 or p1.
bool segment_intersects_walls(const Vec2& p0, const Vec2& p1, const Environment& env);

// Side test against the nearest wall feature.
bool point_in_free_space(const Vec2& p, const Environment& env);

// True iff the body footprint touches a wall, leaves the bounds or sits
// outside free space.
bool body_collides(const Pose& pose, const RobotModel& robot, const Environment& env);

}  // namespace stochgrasp

#endif  // STOCHGRASP_ENV_HPP_
