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

// Convex quadratic programs
//
//   minimize    0.5 z'Pz + q'z + c
//   subject to  l <= Az <= u
//
// solved by operator splitting (ADMM) with Ruiz equilibration, a fixed
// penalty, over-relaxation and a final polishing step on the guessed
// active set.

#ifndef STOCHGRASP_QP_HPP_
#define STOCHGRASP_QP_HPP_

#include <optional>

#include <Eigen/Sparse>

#include "stochgrasp/common.hpp"

namespace stochgrasp {

// Bounds at or beyond this magnitude are treated as infinite.
inline constexpr double kQpInfinity = 1e20;

struct ConvexSubproblem {
  Eigen::SparseMatrix<double> P;  // symmetric PSD, n x n
  Eigen::VectorXd q;
  double c = 0.0;
  Eigen::SparseMatrix<double> A;  // m x n
  Eigen::VectorXd l;
  Eigen::VectorXd u;

  Eigen::Index num_vars() const { return q.size(); }
  Eigen::Index num_constraints() const { return l.size(); }
  double objective(const Eigen::VectorXd& z) const;
  // Throws ContractError on shape mismatch, asymmetric P or l > u.
  void validate() const;
};

enum class QpStatus { optimal, max_iter, infeasible };

const char* to_string(QpStatus s);

struct QpSettings {
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  double eq_rho_scale = 1e3;
  int scaling_iters = 10;
  int check_every = 10;
  bool polish = true;
  double infeasibility_tol = 1e-7;
};

struct QpResult {
  Eigen::VectorXd z;
  Eigen::VectorXd y;  // multipliers; > 0 at active upper bounds
  double objective = 0.0;
  QpStatus status = QpStatus::max_iter;
  int iterations = 0;
  bool polished = false;
  double primal_residual = 0.0;         // ||Az - clip(Az)||_inf
  double dual_residual = 0.0;           // ||Pz + q + A'y||_inf
  double complementarity = 0.0;         // max_i |y_i| * distance to its bound
};

QpResult solve_qp(const ConvexSubproblem& p, double tol, int max_qp_iters,
                  const QpSettings& settings = {},
                  const std::optional<Eigen::VectorXd>& warm_z = std::nullopt,
                  const std::optional<Eigen::VectorXd>& warm_y = std::nullopt);

// KKT residuals of (z, y) for p, in the units of the original problem.
void qp_residuals(const ConvexSubproblem& p, const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                  double* primal, double* dual, double* complementarity);

}  // namespace stochgrasp

#endif  // STOCHGRASP_QP_HPP_
