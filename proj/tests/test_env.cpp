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

#include <algorithm>
#include <vector>

#include "stochgrasp/env.hpp"
#include "stochgrasp/geometry.hpp"
#include "stochgrasp/rng.hpp"
#include "test_support.hpp"

namespace stochgrasp {
namespace {

// Exact orientation on small integer coordinates.
int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross2(b - a, c - a);
  return (v > 0) - (v < 0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool oracle_intersect(const Vec2& p, const Vec2& q, const Vec2& c, const Vec2& d) {
  const int o1 = orient(p, q, c), o2 = orient(p, q, d);
  const int o3 = orient(c, d, p), o4 = orient(c, d, q);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p, q, c)) return true;
  if (o2 == 0 && on_segment(p, q, d)) return true;
  if (o3 == 0 && on_segment(c, d, p)) return true;
  if (o4 == 0 && on_segment(c, d, q)) return true;
  return false;
}

TEST(GeometryTest, SegmentExamples) {
  EXPECT_TRUE(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  EXPECT_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  EXPECT_TRUE(segments_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));   // collinear overlap
  EXPECT_FALSE(segments_intersect({0, 0}, {1, 0}, {2, 0}, {3, 0}));  // collinear apart
  EXPECT_TRUE(segments_intersect({0, 0}, {1, 1}, {1, 1}, {2, 0}));   // shared endpoint
  EXPECT_FALSE(segments_intersect({0, 0}, {1, 1}, {1, 1}, {2, 0}, 1e-6));
  EXPECT_TRUE(segments_intersect({0, 0}, {2, 2}, {1, 1}, {2, 0}, 1e-6));  // mid-segment touch
}

TEST(GeometryTest, SegmentMatchesOrientationOracle) {
  Rng rng(21);
  int hits = 0;
  for (int i = 0; i < 20000; ++i) {
    auto pt = [&] { return Vec2(std::floor(rng.uniform(0, 6)), std::floor(rng.uniform(0, 6))); };
    const Vec2 p = pt(), q = pt(), c = pt(), d = pt();
    if (p == q || c == d) continue;
    const bool expected = oracle_intersect(p, q, c, d);
    hits += expected;
    ASSERT_EQ(segments_intersect(p, q, c, d), expected)
        << p.transpose() << " " << q.transpose() << " | " << c.transpose() << " " << d.transpose();
    // Symmetric in the two segments and in endpoint order.
    ASSERT_EQ(segments_intersect(c, d, p, q), expected);
    ASSERT_EQ(segments_intersect(q, p, d, c), expected)
        << p.transpose() << " " << q.transpose() << " | " << c.transpose() << " " << d.transpose();
  }
  EXPECT_GT(hits, 1000);
}

TEST(GeometryTest, PointInPolygon) {
  const std::vector<Vec2> sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_TRUE(point_in_polygon({1, 1}, sq));
  EXPECT_FALSE(point_in_polygon({3, 1}, sq));
  const std::vector<Vec2> ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  EXPECT_FALSE(point_in_polygon({1.5, 1.5}, ell));
  EXPECT_TRUE(point_in_polygon({0.5, 1.5}, ell));
}

TEST(GeometryTest, ClosestPoint) {
  double t = -1;
  const Vec2 q = closest_point_on_segment({1, 5}, {0, 0}, {4, 0}, &t);
  EXPECT_NEAR(q.x(), 1.0, 1e-15);
  EXPECT_NEAR(t, 0.25, 1e-15);
  EXPECT_NEAR(point_segment_distance({-3, 4}, {0, 0}, {4, 0}), 5.0, 1e-15);
}

TEST(EnvTest, GenerationIsDeterministic) {
  const EnvGenConfig cfg;
  const Environment a = generate_random_environment(cfg, 99);
  const Environment b = generate_random_environment(cfg, 99);
  const Environment c = generate_random_environment(cfg, 100);
  ASSERT_EQ(a.anchors.size(), b.anchors.size());
  EXPECT_EQ(a.anchors, b.anchors);
  EXPECT_EQ(a.walls, b.walls);
  EXPECT_NE(a.anchors, c.anchors);
  EXPECT_EQ(a.rng_seed, 99u);
}

TEST(EnvTest, GeneratedEnvironmentsAreValid) {
  const EnvGenConfig cfg;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::vector<AnchorPlacement> placements;
    const Environment env = generate_random_environment(cfg, seed, &placements);
    ASSERT_NO_THROW(env.validate());
    ASSERT_EQ(placements.size(), env.anchors.size());
    // Recount from the placements: each sits on its recorded segment.
    double total = 0.0;
    for (const auto& w : env.walls) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) total += (w[i + 1] - w[i]).norm();
    }
    EXPECT_EQ(static_cast<long>(env.anchors.size()), std::lround(cfg.anchor_density * total));
    for (std::size_t k = 0; k < placements.size(); ++k) {
      const auto& pl = placements[k];
      const auto& w = env.walls[pl.wall];
      EXPECT_LE(point_segment_distance(env.anchors[k].position, w[pl.segment], w[pl.segment + 1]),
                1e-12);
      EXPECT_GE(pl.arc_length, 0.0);
      const Vec2 dir = (w[pl.segment + 1] - w[pl.segment]).normalized();
      EXPECT_NEAR(env.anchors[k].normal.dot(perp(dir)), 1.0, 1e-12);
      EXPECT_TRUE(env.bounds.contains(env.anchors[k].position));
      const LimitSurface& ls = env.anchors[k].limit;
      EXPECT_GE(ls.mu_major, ls.mu_minor);
      EXPECT_GE(ls.mu_minor, std::min(cfg.mu_minor.lo, cfg.mu_major.lo));
      EXPECT_LE(ls.mu_major, std::max(cfg.mu_major.hi, cfg.mu_minor.hi));
    }
    EXPECT_EQ(env.bounds.min.x(), 0.0);
    EXPECT_LE(env.bounds.max.x(), cfg.length.hi);
  }
}

TEST(EnvTest, ZeroDensityHasNoAnchors) {
  EnvGenConfig cfg;
  cfg.anchor_density = 0.0;
  const Environment env = generate_random_environment(cfg, 4);
  EXPECT_TRUE(env.anchors.empty());
  EXPECT_EQ(env.walls.size(), 2u);
}

TEST(EnvTest, ConfigErrors) {
  EnvGenConfig bad;
  bad.length = {3.0, 2.0};
  EXPECT_THROW(generate_random_environment(bad, 1), ConfigError);
  bad = {};
  bad.anchor_density = -1.0;
  EXPECT_THROW(generate_random_environment(bad, 1), ConfigError);
  bad = {};
  bad.vertex_jitter = 2.0;
  EXPECT_THROW(generate_random_environment(bad, 1), ConfigError);
  bad = {};
  bad.sigma0 = {0.0, 1.0};
  EXPECT_THROW(generate_random_environment(bad, 1), ConfigError);
}

TEST(EnvTest, ValidateRejectsBrokenInvariants) {
  Environment env = testing::square_box();
  EXPECT_NO_THROW(env.validate());
  Environment dup = env;
  dup.anchors[1].id = dup.anchors[0].id;
  EXPECT_THROW(dup.validate(), ConfigError);
  Environment off = env;
  off.anchors[0].position.y() = 0.3;
  EXPECT_THROW(off.validate(), ConfigError);
  Environment flipped = env;
  flipped.anchors[0].normal = Vec2(0, -1);
  EXPECT_THROW(flipped.validate(), ConfigError);
  Environment nonunit = env;
  nonunit.anchors[0].normal = Vec2(0, 2);
  EXPECT_THROW(nonunit.validate(), ConfigError);
  EXPECT_THROW(env.anchor(42), std::out_of_range);
  EXPECT_EQ(env.find_anchor(42), nullptr);
}

TEST(EnvTest, SegmentAgainstWalls) {
  const Environment env = testing::square_box();
  EXPECT_FALSE(segment_intersects_walls({1, 1}, {1.5, 1.5}, env));
  EXPECT_TRUE(segment_intersects_walls({1, 1}, {1, -0.2}, env));
  // Ending exactly on a wall is a touch, not a collision.
  EXPECT_FALSE(segment_intersects_walls({1, 1}, {1.6, 0.0}, env));
}

TEST(EnvTest, FreeSpaceSide) {
  const Environment env = testing::square_box();
  EXPECT_TRUE(point_in_free_space({1, 1}, env));
  EXPECT_FALSE(point_in_free_space({1, -0.1}, env));
  EXPECT_FALSE(point_in_free_space({1, 2.1}, env));
}

TEST(EnvTest, BodyCollisionMatchesFlatCorridorOracle) {
  // With straight walls y = 0 and y = 2 the footprint collides exactly when
  // a corner reaches a wall or leaves the x-range.
  const Environment env = testing::square_box();
  const RobotModel robot;
  Rng rng(8);
  int collisions = 0;
  for (int i = 0; i < 5000; ++i) {
    const Pose pose{rng.uniform(-0.1, 2.1), rng.uniform(-0.1, 2.1), rng.uniform(-kPi, kPi)};
    bool expected = false;
    for (const Vec2& c : robot.footprint(pose)) {
      expected |= c.y() <= 0.0 || c.y() >= 2.0 || c.x() < 0.0 || c.x() > 2.0;
    }
    collisions += expected;
    ASSERT_EQ(body_collides(pose, robot, env), expected) << pose.x << " " << pose.y << " " << pose.phi;
  }
  EXPECT_GT(collisions, 500);
  EXPECT_FALSE(body_collides({1, 1, 0.3}, robot, env));
}

}  // namespace
}  // namespace stochgrasp
