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

#ifndef STOCHGRASP_GEOMETRY_HPP_
#define STOCHGRASP_GEOMETRY_HPP_

#include <array>
#include <span>

#include "stochgrasp/common.hpp"

namespace stochgrasp {

// Closed-segment intersection test. Touching contacts within `touch_tol` of
// either end of p0-p1 are ignored, so a segment may end exactly on another.
bool segments_intersect(const Vec2& p0, const Vec2& p1, const Vec2& c, const Vec2& d,
                        double touch_tol = 0.0);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Closest point on segment a-b to p, and its parameter in [0, 1].
Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double* t = nullptr);

// Even-odd point in polygon.
bool point_in_polygon(const Vec2& p, std::span<const Vec2> polygon);

}  // namespace stochgrasp

#endif  // STOCHGRASP_GEOMETRY_HPP_
