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

#include "stochgrasp/geometry.hpp"

#include <algorithm>

namespace stochgrasp {

bool segments_intersect(const Vec2& p0, const Vec2& p1, const Vec2& c, const Vec2& d,
                        double touch_tol) {
  const Vec2 r = p1 - p0;
  const Vec2 s = d - c;
  const double len = r.norm();
  const double denom = cross2(r, s);
  const Vec2 qp = c - p0;
  const double scale = std::max({r.squaredNorm(), s.squaredNorm(), 1e-300});

  if (std::abs(denom) > 1e-14 * scale) {
    const double t = cross2(qp, s) / denom;
    const double u = cross2(qp, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
    if (touch_tol > 0.0 && len > 0.0 && (t * len <= touch_tol || (1.0 - t) * len <= touch_tol)) {
      return false;
    }
    return true;
  }

  // Parallel. Only collinear overlaps count.
  if (std::abs(cross2(qp, r)) > 1e-14 * scale) return false;
  if (len == 0.0) {
    // Any contact of a point is a contact at its own ends.
    if (touch_tol > 0.0) return false;
    return point_segment_distance(p0, c, d) <= 1e-14 * std::sqrt(scale);
  }
  const double l2 = r.squaredNorm();
  const double tc = qp.dot(r) / l2;
  const double td = (d - p0).dot(r) / l2;
  const double lo = std::max(0.0, std::min(tc, td));
  const double hi = std::min(1.0, std::max(tc, td));
  if (lo > hi) return false;
  if (touch_tol > 0.0) {
    const double tt = touch_tol / len;
    if (hi <= tt || lo >= 1.0 - tt) return false;
  }
  return true;
}

Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double* t_out) {
  const Vec2 ab = b - a;
  const double l2 = ab.squaredNorm();
  double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  if (t_out) *t_out = t;
  return a + t * ab;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  return (p - closest_point_on_segment(p, a, b)).norm();
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace stochgrasp
