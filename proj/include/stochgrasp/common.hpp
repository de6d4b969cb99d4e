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

#ifndef STOCHGRASP_COMMON_HPP_
#define STOCHGRASP_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stochgrasp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
// (F_x, F_y, tau) acting on the body, torque about the body center.
using Wrench = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr int kNumBooms = 4;

// Planar cross product a x b.
inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Counter-clockwise perpendicular.
inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// Error taxonomy. Feasibility failures are reported as values, not thrown;
// these are for contract breaches and malformed input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class OutOfSurfaceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SeedFailure : public std::runtime_error {
 public:
  SeedFailure(const std::string& what, int index)
      : std::runtime_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;

  Vec2 position() const { return Vec2(x, y); }
  Vec3 vec() const { return Vec3(x, y, phi); }
  static Pose from_vec(const Vec3& v) { return Pose{v.x(), v.y(), wrap_angle(v.z())}; }
  bool operator==(const Pose&) const = default;
};

// Counter-based seed split (splitmix64 finalizer). Every stochastic
// component derives its stream from (master, stream, index) so results do
// not depend on evaluation order.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return mix64(mix64(mix64(master) ^ stream) ^ index);
}

}  // namespace stochgrasp

#endif  // STOCHGRASP_COMMON_HPP_
