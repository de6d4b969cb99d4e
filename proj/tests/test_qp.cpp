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

#include <vector>

#include "stochgrasp/qp.hpp"
#include "stochgrasp/rng.hpp"
#include "oracles.hpp"

namespace stochgrasp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::dense_qp;
using testing::enumerate_active_sets;

TEST(QpTest, ScalarExamples) {
  MatrixXd p(1, 1), a(1, 1);
  p << 1.0;
  a << 1.0;
  VectorXd q(1), l(1), u(1);
  q << -1.0;
  l << 0.0;
  u << 0.5;
  QpResult r = solve_qp(dense_qp(p, q, a, l, u), 1e-8, 10000);
  EXPECT_EQ(r.status, QpStatus::optimal);
  EXPECT_NEAR(r.z(0), 0.5, 1e-7);
  EXPECT_NEAR(r.objective, -0.375, 1e-7);
  EXPECT_GT(r.y(0), 0.0);  // active upper bound

  // Unconstrained optimum inside the box.
  u << 2.0;
  r = solve_qp(dense_qp(p, q, a, l, u), 1e-8, 10000);
  EXPECT_NEAR(r.z(0), 1.0, 1e-7);
  EXPECT_NEAR(r.y(0), 0.0, 1e-7);

  // Linear program on a box.
  p << 0.0;
  r = solve_qp(dense_qp(p, q, a, l, u), 1e-8, 10000);
  EXPECT_NEAR(r.z(0), 2.0, 1e-6);
}

TEST(QpTest, ConstantTermEntersObjective) {
  ConvexSubproblem qp = dense_qp(MatrixXd::Identity(2, 2), VectorXd::Zero(2), MatrixXd::Identity(2, 2),
                                 VectorXd::Constant(2, 1.0), VectorXd::Constant(2, 3.0));
  qp.c = 4.0;
  const QpResult r = solve_qp(qp, 1e-8, 10000);
  EXPECT_NEAR(r.objective, 5.0, 1e-7);
  EXPECT_NEAR(qp.objective(r.z), r.objective, 1e-12);
}

TEST(QpTest, DetectsInfeasibility) {
  MatrixXd p = MatrixXd::Identity(2, 2);
  MatrixXd a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  VectorXd l(3), u(3);
  l << 1, 1, -1;
  u << 2, 2, 0.5;  // x + y <= 0.5 contradicts x, y >= 1
  const QpResult r = solve_qp(dense_qp(p, VectorXd::Zero(2), a, l, u), 1e-6, 20000);
  EXPECT_EQ(r.status, QpStatus::infeasible);
}

TEST(QpTest, RandomQpsMatchActiveSetEnumeration) {
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 9);  // 2..10
    const int m = 1 + static_cast<int>(rng.uniform() * 6);  // 1..6
    MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = rng.normal();
    const MatrixXd p = b * b.transpose() / n + 0.05 * MatrixXd::Identity(n, n);
    VectorXd q(n), z0(n);
    for (int i = 0; i < n; ++i) {
      q(i) = 3.0 * rng.normal();
      z0(i) = rng.normal();
    }
    MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    const VectorXd az0 = a * z0;
    VectorXd l(m), u(m);
    for (int i = 0; i < m; ++i) {
      const double kind = rng.uniform();
      if (kind < 0.15) {
        l(i) = u(i) = az0(i);
      } else if (kind < 0.3) {
        l(i) = -kQpInfinity;
        u(i) = az0(i) + rng.uniform(0.0, 0.5);
      } else {
        l(i) = az0(i) - rng.uniform(0.0, 1.0);
        u(i) = az0(i) + rng.uniform(0.0, 1.0);
      }
    }
    const ConvexSubproblem qp = dense_qp(p, q, a, l, u);
    ASSERT_NO_THROW(qp.validate());
    const QpResult r = solve_qp(qp, 1e-8, 50000);
    ASSERT_EQ(r.status, QpStatus::optimal) << trial;
    const double oracle = enumerate_active_sets(p, q, a, l, u);
    EXPECT_NEAR(r.objective, oracle, 1e-6) << "trial " << trial << " n=" << n << " m=" << m;
    EXPECT_LE(r.primal_residual, 1e-6);
    double pr, du, co;
    qp_residuals(qp, r.z, r.y, &pr, &du, &co);
    EXPECT_LE(du, 1e-5);
  }
}

TEST(QpTest, WarmStartReachesSameOptimum) {
  MatrixXd p(2, 2);
  p << 2, 0.5, 0.5, 1;
  VectorXd q(2);
  q << -1, -1;
  const MatrixXd a = MatrixXd::Identity(2, 2);
  const VectorXd l = VectorXd::Zero(2), u = VectorXd::Constant(2, 0.3);
  const ConvexSubproblem qp = dense_qp(p, q, a, l, u);
  const QpResult cold = solve_qp(qp, 1e-8, 10000);
  const QpResult warm = solve_qp(qp, 1e-8, 10000, {}, cold.z, cold.y);
  EXPECT_NEAR(cold.objective, warm.objective, 1e-9);
  EXPECT_LE(warm.iterations, cold.iterations);
}

TEST(QpTest, ValidateCatchesShapeErrors) {
  ConvexSubproblem qp = dense_qp(MatrixXd::Identity(2, 2), VectorXd::Zero(2), MatrixXd::Identity(2, 2),
                                 VectorXd::Zero(2), VectorXd::Ones(2));
  EXPECT_NO_THROW(qp.validate());
  ConvexSubproblem bad = qp;
  bad.l(0) = 2.0;
  EXPECT_THROW(bad.validate(), ContractError);
  bad = qp;
  bad.q = VectorXd::Zero(3);
  EXPECT_THROW(bad.validate(), ContractError);
  bad = qp;
  MatrixXd asym(2, 2);
  asym << 1, 1, 0, 1;
  bad.P = asym.sparseView();
  EXPECT_THROW(bad.validate(), ContractError);
}

}  // namespace
}  // namespace stochgrasp
