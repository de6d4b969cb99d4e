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

// Independent oracles shared by the unit tests and the acceptance binary.

#ifndef STOCHGRASP_TESTS_ORACLES_HPP_
#define STOCHGRASP_TESTS_ORACLES_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "stochgrasp/feasibility.hpp"
#include "stochgrasp/qp.hpp"
#include "stochgrasp/rng.hpp"
#include "test_support.hpp"

namespace stochgrasp::testing {

struct OracleAllocation {
  bool exists = false;
  double robustness = kNegInf;
};

// Robustness maximized over the tension line by dense grid plus golden
// section, built from first principles: shoulder positions, unit pull
// directions and a cofactor null vector.
inline OracleAllocation oracle_allocate(const Pose& pose, const Environment& env,
                                        const Stance& stance, const RobotModel& robot) {
  Eigen::Matrix<double, 3, 4> w;
  std::array<double, 4> mu{}, sigma{};
  for (int i = 0; i < 4; ++i) {
    const Anchor& a = env.anchor(*stance.anchor_ids[i]);
    const Vec2 arm = rotate(robot.shoulder_offsets[i], pose.phi);
    const Vec2 d = a.position - pose.position() - arm;
    const Vec2 u = d.normalized();
    w.col(i) << u.x(), u.y(), arm.x() * u.y() - arm.y() * u.x();
    const Vec2 back = -u;
    const double psi =
        std::atan2(a.normal.x() * back.y() - a.normal.y() * back.x(), a.normal.dot(back));
    mu[i] = oracle_mu(a.limit.mu_major, a.limit.mu_minor, psi);
    sigma[i] = a.limit.sigma0 + a.limit.sigma_slope * std::abs(psi);
  }
  const Eigen::Vector3d target(0.0, -robot.body_mass * env.gravity.y(), 0.0);
  Eigen::Vector4d n;
  for (int j = 0; j < 4; ++j) {
    Eigen::Matrix3d minor;
    int c = 0;
    for (int i = 0; i < 4; ++i) {
      if (i != j) minor.col(c++) = w.col(i);
    }
    n(j) = (j % 2 ? -1.0 : 1.0) * minor.determinant();
  }
  n.normalize();
  const Eigen::Vector4d fp = w.transpose() * (w * w.transpose()).inverse() * target;
  double tlo = -1e9, thi = 1e9;
  for (int i = 0; i < 4; ++i) {
    double a = (robot.f_min - fp(i)) / n(i);
    double b = (robot.f_max - fp(i)) / n(i);
    if (a > b) std::swap(a, b);
    tlo = std::max(tlo, a);
    thi = std::min(thi, b);
  }
  OracleAllocation out;
  if (tlo > thi) return out;
  out.exists = true;
  auto r = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::log(oracle_phi((mu[i] - fp(i) - t * n(i)) / sigma[i]));
    return s;
  };
  const int grid = 20000;
  double best_t = tlo;
  for (int g = 0; g <= grid; ++g) {
    const double t = tlo + (thi - tlo) * g / grid;
    if (r(t) > r(best_t)) best_t = t;
  }
  double a = std::max(tlo, best_t - (thi - tlo) / grid);
  double b = std::min(thi, best_t + (thi - tlo) / grid);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (r(c) >= r(d)) b = d; else a = c;
  }
  out.robustness = std::max(r(0.5 * (a + b)), r(best_t));
  return out;
}

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline ConvexSubproblem dense_qp(const MatrixXd& p, const VectorXd& q, const MatrixXd& a,
                          const VectorXd& l, const VectorXd& u) {
  ConvexSubproblem qp;
  qp.P = p.sparseView();
  qp.q = q;
  qp.A = a.sparseView();
  qp.l = l;
  qp.u = u;
  return qp;
}

// Minimum over every lower/upper/inactive assignment of the constraints of
// the equality-constrained stationary point, among those that are
// feasible. Exact for strictly convex problems.
inline double enumerate_active_sets(const MatrixXd& p, const VectorXd& q, const MatrixXd& a,
                             const VectorXd& l, const VectorXd& u) {
  const int n = static_cast<int>(q.size());
  const int m = static_cast<int>(l.size());
  int combos = 1;
  for (int i = 0; i < m; ++i) combos *= 3;
  double best = std::numeric_limits<double>::infinity();
  for (int code = 0; code < combos; ++code) {
    std::vector<std::pair<int, double>> active;
    int c = code;
    bool skip = false;
    for (int i = 0; i < m; ++i) {
      const int s = c % 3;
      c /= 3;
      if (l(i) == u(i) && s != 1) skip = true;  // equalities only as "lower"
      if (s == 1) active.emplace_back(i, l(i));
      if (s == 2) active.emplace_back(i, u(i));
    }
    if (skip) continue;
    const int k = static_cast<int>(active.size());
    if (k > n) continue;
    MatrixXd kkt = MatrixXd::Zero(n + k, n + k);
    VectorXd rhs(n + k);
    kkt.topLeftCorner(n, n) = p;
    rhs.head(n) = -q;
    for (int j = 0; j < k; ++j) {
      kkt.block(0, n + j, n, 1) = a.row(active[j].first).transpose();
      kkt.block(n + j, 0, 1, n) = a.row(active[j].first);
      rhs(n + j) = active[j].second;
    }
    Eigen::FullPivLU<MatrixXd> lu(kkt);
    if (lu.rank() < n + k) continue;
    const VectorXd z = lu.solve(rhs).head(n);
    const VectorXd az = a * z;
    bool feasible = true;
    for (int i = 0; i < m; ++i) feasible &= az(i) >= l(i) - 1e-9 && az(i) <= u(i) + 1e-9;
    if (feasible) best = std::min(best, 0.5 * z.dot(p * z) + q.dot(z));
  }
  return best;
}

}  // namespace stochgrasp::testing

#endif  // STOCHGRASP_TESTS_ORACLES_HPP_
