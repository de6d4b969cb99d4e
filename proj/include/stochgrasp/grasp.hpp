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

// Stochastic limit surface of a microspine grasp and the log-probability
// robustness metric built on it.
//
// The maximum force a grasp sustains when pulled at angle psi from its
// surface normal is Gaussian, N(mu(psi), sigma(psi)^2). mu traces a
// half-ellipse (mu_major along the normal, mu_minor laterally) and sigma
// grows linearly in |psi|. For independent grasps the log of the joint
// success probability is
//
//   r = sum_i log Phi((mu_i(psi_i) - f_i) / sigma_i(psi_i)),
//
// which is concave in the applied tensions f. r <= 0; a configuration is
// robust when r >= log(0.95).

#ifndef STOCHGRASP_GRASP_HPP_
#define STOCHGRASP_GRASP_HPP_

#include <span>
#include <vector>

#include "stochgrasp/common.hpp"

namespace stochgrasp {

struct LimitSurface {
  double mu_major = 20.0;   // N, expected limit at psi = 0
  double mu_minor = 8.0;    // N, expected limit at psi = +-pi/2
  double sigma0 = 1.0;      // N
  double sigma_slope = 0.5; // N / rad

  // Throws ConfigError when the parameters are not a valid surface.
  void validate() const;
  bool operator==(const LimitSurface&) const = default;
};

struct Anchor {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 normal = Vec2(0.0, 1.0);  // unit, points into free space
  LimitSurface limit;

  bool operator==(const Anchor&) const = default;
};

// Signed angle between the anchor normal and the direction from the anchor
// toward the shoulder (the direction the boom drags the gripper). In
// [-pi, pi]; |psi| > pi/2 means the pull points into the wall.
double pull_angle(const Anchor& anchor, const Vec2& shoulder_position);

struct MuSigma {
  double mu;
  double sigma;
};

// Throws OutOfSurfaceError for |psi| > pi/2.
MuSigma mu_sigma(const LimitSurface& limit, double psi);

struct GraspQuery {
  const Anchor* anchor = nullptr;
  Vec2 pull_direction = Vec2::Zero();  // unit, anchor -> shoulder
  double force_magnitude = 0.0;        // tension, >= 0
};

struct GraspProbability {
  double value = 0.0;
  bool out_of_surface = false;
};

GraspProbability grasp_success_prob(const GraspQuery& query);

// log Phi(z) for one grasp, or kNegInf when psi is out of surface.
double grasp_log_prob(double force, double psi, const LimitSurface& limit);

// Standardized margin z = (mu(psi) - f) / sigma(psi); -inf out of surface.
double grasp_margin(double force, double psi, const LimitSurface& limit);

// Sum of per-grasp log success probabilities. Returns kNegInf if any grasp
// is pulled outside its surface. Throws std::invalid_argument on length
// mismatch or empty input.
double stance_robustness(std::span<const double> forces,
                         std::span<const double> psis,
                         std::span<const LimitSurface> limits);

struct RobustnessGradient {
  Eigen::VectorXd d_force;
  Eigen::VectorXd d_psi;
  bool underflow = false;
};

// Analytic partials of stance_robustness. d|psi|/dpsi is taken as sign(psi)
// with 0 at psi = 0. Out-of-surface grasps yield zero entries and set the
// underflow flag.
RobustnessGradient robustness_gradient(std::span<const double> forces,
                                       std::span<const double> psis,
                                       std::span<const LimitSurface> limits);

// Value, gradient and diagonal second derivatives of one grasp's log
// success probability in (f, psi). Used to build local models for SCP.
struct GraspTerm {
  double value = 0.0;
  double d_f = 0.0;
  double d_psi = 0.0;
  double d_ff = 0.0;
  double d_psipsi = 0.0;
  bool out_of_surface = false;
};

GraspTerm grasp_term(double force, double psi, const LimitSurface& limit);

}  // namespace stochgrasp

#endif  // STOCHGRASP_GRASP_HPP_
