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

// Shared fixtures and independent oracles for the unit tests.

#ifndef STOCHGRASP_TESTS_TEST_SUPPORT_HPP_
#define STOCHGRASP_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <vector>

#include "stochgrasp/env.hpp"
#include "stochgrasp/grasp.hpp"
#include "stochgrasp/rng.hpp"

namespace stochgrasp::testing {

inline double oracle_phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Polar radius of the half-ellipse with semi-axis a along the normal.
inline double oracle_mu(double a, double b, double psi) {
  const double c = std::cos(psi) / a;
  const double s = std::sin(psi) / b;
  return 1.0 / std::sqrt(c * c + s * s);
}

inline LimitSurface random_limit(Rng& rng) {
  LimitSurface ls;
  ls.mu_minor = rng.uniform(5.0, 20.0);
  ls.mu_major = ls.mu_minor + rng.uniform(0.0, 20.0);
  ls.sigma0 = rng.uniform(0.5, 2.0);
  ls.sigma_slope = rng.uniform(0.0, 1.5);
  return ls;
}

inline Anchor make_anchor(int id, Vec2 position, Vec2 normal, LimitSurface limit = {}) {
  Anchor a;
  a.id = id;
  a.position = position;
  a.normal = normal.normalized();
  a.limit = limit;
  return a;
}

// Straight corridor: floor y = 0 (normal +y) and ceiling y = height
// (normal -y), anchors at the given x positions on each wall.
inline Environment flat_corridor(double length, double height, const std::vector<double>& floor_x,
                                 const std::vector<double>& ceiling_x, LimitSurface limit = {}) {
  Environment env;
  env.walls = {{Vec2(0.0, 0.0), Vec2(length, 0.0)}, {Vec2(length, height), Vec2(0.0, height)}};
  int id = 0;
  for (double x : floor_x) env.anchors.push_back(make_anchor(id++, {x, 0.0}, {0.0, 1.0}, limit));
  for (double x : ceiling_x) {
    env.anchors.push_back(make_anchor(id++, {x, height}, {0.0, -1.0}, limit));
  }
  env.bounds.min = Vec2(0.0, -0.5);
  env.bounds.max = Vec2(length, height + 0.5);
  return env;
}

// A 2 m wide box corridor with four anchors at the corners of a square
// around (1, 1), strong enough to hold the default robot.
inline Environment square_box() {
  LimitSurface strong{40.0, 25.0, 0.5, 0.2};
  return flat_corridor(2.0, 2.0, {1.6, 0.4}, {1.6, 0.4}, strong);
}

}  // namespace stochgrasp::testing

#endif  // STOCHGRASP_TESTS_TEST_SUPPORT_HPP_
