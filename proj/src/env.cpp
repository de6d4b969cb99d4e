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

#include "stochgrasp/env.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "stochgrasp/geometry.hpp"
#include "stochgrasp/rng.hpp"

namespace stochgrasp {
namespace {

void check_range(const Range& r, const char* name, bool positive) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw ConfigError(std::string("envgen: empty or invalid range for ") + name);
  }
  if (positive && !(r.lo > 0.0)) {
    throw ConfigError(std::string("envgen: range for ") + name + " must be positive");
  }
}

Vec2 left_normal(const Vec2& a, const Vec2& b) { return perp(b - a).normalized(); }

}  // namespace

const Anchor* Environment::find_anchor(int id) const {
  for (const auto& a : anchors) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

const Anchor& Environment::anchor(int id) const {
  const Anchor* a = find_anchor(id);
  if (a == nullptr) throw std::out_of_range("no anchor with id " + std::to_string(id));
  return *a;
}

void Environment::validate() const {
  std::set<int> ids;
  for (const auto& w : walls) {
    if (w.size() < 2) throw ConfigError("environment: wall with fewer than two vertices");
  }
  for (const auto& a : anchors) {
    if (!ids.insert(a.id).second) {
      throw ConfigError("environment: duplicate anchor id " + std::to_string(a.id));
    }
    if (std::abs(a.normal.norm() - 1.0) > 1e-9) {
      throw ConfigError("environment: anchor " + std::to_string(a.id) + " normal is not unit");
    }
    a.limit.validate();
    double best = std::numeric_limits<double>::infinity();
    Vec2 host_normal = Vec2::Zero();
    for (const auto& w : walls) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double d = point_segment_distance(a.position, w[i], w[i + 1]);
        if (d < best) {
          best = d;
          host_normal = left_normal(w[i], w[i + 1]);
        }
      }
    }
    if (!(best <= 1e-6)) {
      throw ConfigError("environment: anchor " + std::to_string(a.id) + " is not on a wall");
    }
    if (a.normal.dot(host_normal) <= 0.0) {
      throw ConfigError("environment: anchor " + std::to_string(a.id) +
                        " normal does not point into free space");
    }
  }
}

void EnvGenConfig::validate() const {
  check_range(length, "length", true);
  check_range(width, "width", true);
  check_range(mu_major, "mu_major", true);
  check_range(mu_minor, "mu_minor", true);
  check_range(sigma0, "sigma0", true);
  check_range(sigma_slope, "sigma_slope", false);
  if (sigma_slope.lo < 0.0) throw ConfigError("envgen: sigma_slope must be non-negative");
  if (!(anchor_density >= 0.0)) throw ConfigError("envgen: anchor_density must be non-negative");
  if (!(vertex_spacing > 0.0)) throw ConfigError("envgen: vertex_spacing must be positive");
  if (!(vertex_jitter >= 0.0) || 2.0 * vertex_jitter >= width.lo) {
    throw ConfigError("envgen: vertex_jitter must be non-negative and below half the width");
  }
  if (!(bounds_margin >= 0.0)) throw ConfigError("envgen: bounds_margin must be non-negative");
}

Environment generate_random_environment(const EnvGenConfig& config, std::uint64_t seed,
                                        std::vector<AnchorPlacement>* placements) {
  config.validate();
  Rng rng(seed);
  Environment env;
  env.rng_seed = seed;
  env.gravity = config.gravity;

  const double length = rng.uniform(config.length.lo, config.length.hi);
  const double width = rng.uniform(config.width.lo, config.width.hi);
  const int segments = std::max(1, static_cast<int>(std::lround(length / config.vertex_spacing)));

  std::vector<Vec2> floor, ceiling;
  for (int i = 0; i <= segments; ++i) {
    const double x = length * i / segments;
    floor.emplace_back(x, rng.uniform(-config.vertex_jitter, config.vertex_jitter));
  }
  for (int i = segments; i >= 0; --i) {
    const double x = length * i / segments;
    ceiling.emplace_back(x, width + rng.uniform(-config.vertex_jitter, config.vertex_jitter));
  }
  env.walls = {floor, ceiling};

  double ymin = 0.0, ymax = 0.0;
  for (const auto& w : env.walls) {
    for (const auto& v : w) {
      ymin = std::min(ymin, v.y());
      ymax = std::max(ymax, v.y());
    }
  }
  env.bounds.min = Vec2(0.0, ymin - config.bounds_margin);
  env.bounds.max = Vec2(length, ymax + config.bounds_margin);

  // Arc-length table over both walls.
  struct Seg {
    int wall, index;
    double start, len;
  };
  std::vector<Seg> segs;
  std::vector<double> wall_start;
  double total = 0.0;
  for (int w = 0; w < static_cast<int>(env.walls.size()); ++w) {
    const auto& poly = env.walls[w];
    wall_start.push_back(total);
    for (int i = 0; i + 1 < static_cast<int>(poly.size()); ++i) {
      const double l = (poly[i + 1] - poly[i]).norm();
      segs.push_back({w, i, total, l});
      total += l;
    }
  }

  const int count = static_cast<int>(std::lround(config.anchor_density * total));
  for (int k = 0; k < count; ++k) {
    const double s = rng.uniform(0.0, total);
    auto it = std::upper_bound(segs.begin(), segs.end(), s,
                               [](double v, const Seg& sg) { return v < sg.start; });
    const Seg& sg = *std::prev(it);
    const auto& poly = env.walls[sg.wall];
    const double t = std::clamp((s - sg.start) / sg.len, 0.0, 1.0);
    Anchor a;
    a.id = k;
    a.position = poly[sg.index] + t * (poly[sg.index + 1] - poly[sg.index]);
    a.normal = left_normal(poly[sg.index], poly[sg.index + 1]);
    double major = rng.uniform(config.mu_major.lo, config.mu_major.hi);
    double minor = rng.uniform(config.mu_minor.lo, config.mu_minor.hi);
    if (minor > major) std::swap(minor, major);
    a.limit.mu_major = major;
    a.limit.mu_minor = minor;
    a.limit.sigma0 = rng.uniform(config.sigma0.lo, config.sigma0.hi);
    a.limit.sigma_slope = rng.uniform(config.sigma_slope.lo, config.sigma_slope.hi);
    env.anchors.push_back(a);
    if (placements) placements->push_back({sg.wall, sg.index, s - wall_start[sg.wall]});
  }
  return env;
}

bool segment_intersects_walls(const Vec2& p0, const Vec2& p1, const Environment& env) {
  for (const auto& w : env.walls) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (segments_intersect(p0, p1, w[i], w[i + 1], kTouchTolerance)) return true;
    }
  }
  return false;
}

bool point_in_free_space(const Vec2& p, const Environment& env) {
  double best = std::numeric_limits<double>::infinity();
  double side = 1.0;
  for (const auto& w : env.walls) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      double t = 0.0;
      const Vec2 q = closest_point_on_segment(p, w[i], w[i + 1], &t);
      const double d = (p - q).norm();
      if (d >= best) continue;
      best = d;
      Vec2 n = left_normal(w[i], w[i + 1]);
      // At a shared vertex use the pseudo-normal of both segments.
      if (t <= 0.0 && i > 0) n += left_normal(w[i - 1], w[i]);
      if (t >= 1.0 && i + 2 < w.size()) n += left_normal(w[i + 1], w[i + 2]);
      side = n.dot(p - q);
    }
  }
  return side > 0.0;
}

bool body_collides(const Pose& pose, const RobotModel& robot, const Environment& env) {
  const auto fp = robot.footprint(pose);
  for (const auto& c : fp) {
    if (!env.bounds.contains(c)) return true;
  }
  for (int i = 0; i < 4; ++i) {
    const Vec2& a = fp[i];
    const Vec2& b = fp[(i + 1) % 4];
    for (const auto& w : env.walls) {
      for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        if (segments_intersect(a, b, w[k], w[k + 1])) return true;
      }
    }
  }
  for (const auto& w : env.walls) {
    for (const auto& v : w) {
      if (point_in_polygon(v, fp)) return true;
    }
  }
  return !point_in_free_space(pose.position(), env);
}

}  // namespace stochgrasp
