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

#include "stochgrasp/grasp.hpp"

#include <stdexcept>

#include "stochgrasp/normal.hpp"

namespace stochgrasp {
namespace {

constexpr double kUnderflowZ = -37.0;

bool in_surface(double psi) { return std::abs(psi) <= 0.5 * kPi; }

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct EllipseTerms {
  double mu, d_mu, dd_mu;
  double sigma, d_sigma;
};

EllipseTerms ellipse_terms(const LimitSurface& ls, double psi) {
  const double a = ls.mu_major;
  const double b = ls.mu_minor;
  const double ab = a * b;
  const double k = a * a - b * b;
  const double s = std::sin(psi);
  const double d = b * b + k * s * s;
  const double dd = k * std::sin(2.0 * psi);
  const double ddd = 2.0 * k * std::cos(2.0 * psi);
  const double inv_sqrt = 1.0 / std::sqrt(d);
  EllipseTerms t;
  t.mu = ab * inv_sqrt;
  t.d_mu = -0.5 * ab * inv_sqrt / d * dd;
  t.dd_mu = 0.75 * ab * inv_sqrt / (d * d) * dd * dd - 0.5 * ab * inv_sqrt / d * ddd;
  t.sigma = ls.sigma0 + ls.sigma_slope * std::abs(psi);
  t.d_sigma = ls.sigma_slope * sign_or_zero(psi);
  return t;
}

void check_lengths(std::span<const double> forces, std::span<const double> psis,
                   std::span<const LimitSurface> limits) {
  if (forces.empty() || forces.size() != psis.size() || forces.size() != limits.size()) {
    throw std::invalid_argument("robustness: forces, psis and limits must be equal-length and non-empty");
  }
}

}  // namespace

void LimitSurface::validate() const {
  if (!(mu_minor > 0.0) || !(mu_major >= mu_minor)) {
    throw ConfigError("limit surface requires mu_major >= mu_minor > 0");
  }
  if (!(sigma0 > 0.0) || !(sigma_slope >= 0.0)) {
    throw ConfigError("limit surface requires sigma0 > 0 and sigma_slope >= 0");
  }
}

double pull_angle(const Anchor& anchor, const Vec2& shoulder_position) {
  const Vec2 d = shoulder_position - anchor.position;
  if (d.norm() == 0.0) {
    throw GeometryError("pull_angle: shoulder coincides with anchor " + std::to_string(anchor.id));
  }
  return std::atan2(cross2(anchor.normal, d), anchor.normal.dot(d));
}

MuSigma mu_sigma(const LimitSurface& limit, double psi) {
  if (!in_surface(psi)) throw OutOfSurfaceError("mu_sigma: |psi| > pi/2");
  const EllipseTerms t = ellipse_terms(limit, psi);
  return {t.mu, t.sigma};
}

double grasp_margin(double force, double psi, const LimitSurface& limit) {
  if (!in_surface(psi)) return kNegInf;
  const EllipseTerms t = ellipse_terms(limit, psi);
  return (t.mu - force) / t.sigma;
}

double grasp_log_prob(double force, double psi, const LimitSurface& limit) {
  return log_normal_cdf(grasp_margin(force, psi, limit));
}

GraspProbability grasp_success_prob(const GraspQuery& query) {
  if (query.anchor == nullptr) throw std::invalid_argument("grasp_success_prob: null anchor");
  const Vec2& n = query.anchor->normal;
  const Vec2& d = query.pull_direction;
  const double psi = std::atan2(cross2(n, d), n.dot(d));
  if (!in_surface(psi)) return {0.0, true};
  return {normal_cdf(grasp_margin(query.force_magnitude, psi, query.anchor->limit)), false};
}

double stance_robustness(std::span<const double> forces, std::span<const double> psis,
                         std::span<const LimitSurface> limits) {
  check_lengths(forces, psis, limits);
  double r = 0.0;
  for (std::size_t i = 0; i < forces.size(); ++i) {
    if (!in_surface(psis[i])) return kNegInf;
    r += grasp_log_prob(forces[i], psis[i], limits[i]);
  }
  return r;
}

GraspTerm grasp_term(double force, double psi, const LimitSurface& limit) {
  GraspTerm g;
  if (!in_surface(psi)) {
    g.value = kNegInf;
    g.out_of_surface = true;
    return g;
  }
  const EllipseTerms t = ellipse_terms(limit, psi);
  const double z = (t.mu - force) / t.sigma;
  const double h = normal_hazard(z);
  const double h2 = log_normal_cdf_second(z);
  const double z_psi = t.d_mu / t.sigma - z * t.d_sigma / t.sigma;
  const double z_psipsi =
      t.dd_mu / t.sigma - t.d_mu * t.d_sigma / (t.sigma * t.sigma) - z_psi * t.d_sigma / t.sigma +
      z * t.d_sigma * t.d_sigma / (t.sigma * t.sigma);
  g.value = log_normal_cdf(z);
  g.d_f = -h / t.sigma;
  g.d_ff = h2 / (t.sigma * t.sigma);
  g.d_psi = h * z_psi;
  g.d_psipsi = h2 * z_psi * z_psi + h * z_psipsi;
  return g;
}

RobustnessGradient robustness_gradient(std::span<const double> forces,
                                       std::span<const double> psis,
                                       std::span<const LimitSurface> limits) {
  check_lengths(forces, psis, limits);
  const auto n = static_cast<Eigen::Index>(forces.size());
  RobustnessGradient out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), false};
  for (Eigen::Index i = 0; i < n; ++i) {
    const GraspTerm g = grasp_term(forces[i], psis[i], limits[i]);
    if (g.out_of_surface) {
      out.underflow = true;
      continue;
    }
    if (grasp_margin(forces[i], psis[i], limits[i]) < kUnderflowZ) out.underflow = true;
    out.d_force[i] = g.d_f;
    out.d_psi[i] = g.d_psi;
  }
  return out;
}

}  // namespace stochgrasp
