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

#include "stochgrasp/qp.hpp"

#include <algorithm>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace stochgrasp {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::VectorXd;

double ConvexSubproblem::objective(const VectorXd& z) const {
  return 0.5 * z.dot(P * z) + q.dot(z) + c;
}

void ConvexSubproblem::validate() const {
  const auto n = q.size();
  const auto m = l.size();
  if (P.rows() != n || P.cols() != n || A.cols() != n || A.rows() != m || u.size() != m) {
    throw ContractError("qp: inconsistent dimensions");
  }
  const SpMat d = SpMat(P.transpose()) - P;
  if (d.nonZeros() > 0 && d.coeffs().cwiseAbs().maxCoeff() > 1e-9) {
    throw ContractError("qp: P is not symmetric");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(l(i) <= u(i))) throw ContractError("qp: l > u in row " + std::to_string(i));
  }
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::max_iter: return "max_iter";
    case QpStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

void qp_residuals(const ConvexSubproblem& p, const VectorXd& z, const VectorXd& y,
                  double* primal, double* dual, double* complementarity) {
  const VectorXd az = p.A * z;
  double pr = 0.0, co = 0.0;
  for (Eigen::Index i = 0; i < az.size(); ++i) {
    pr = std::max(pr, std::max(p.l(i) - az(i), az(i) - p.u(i)));
    // Against a missing bound the multiplier itself is the violation.
    if (y(i) > 0.0) {
      co = std::max(co, p.u(i) >= kQpInfinity ? y(i) : y(i) * std::abs(p.u(i) - az(i)));
    } else if (y(i) < 0.0) {
      co = std::max(co, p.l(i) <= -kQpInfinity ? -y(i) : -y(i) * std::abs(az(i) - p.l(i)));
    }
  }
  if (primal) *primal = std::max(pr, 0.0);
  if (dual) {
    *dual = az.size() > 0 ? (p.P * z + p.q + p.A.transpose() * y).lpNorm<Eigen::Infinity>()
                          : (p.P * z + p.q).lpNorm<Eigen::Infinity>();
  }
  if (complementarity) *complementarity = co;
}

namespace {

double col_inf_norm(const SpMat& m, Eigen::Index j) {
  double v = 0.0;
  for (SpMat::InnerIterator it(m, j); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

double clamp_scale(double v) {
  if (v < 1e-4) return 1.0;
  return std::min(v, 1e4);
}

// Ruiz equilibration of [P A'; A 0] plus a scalar cost scaling.
struct Scaling {
  VectorXd d, e;
  double cost = 1.0;
};

Scaling equilibrate(SpMat& P, VectorXd& q, SpMat& A, VectorXd& l, VectorXd& u, int iters) {
  const auto n = q.size(), m = l.size();
  Scaling s{VectorXd::Ones(n), VectorXd::Ones(m), 1.0};
  for (int k = 0; k < iters; ++k) {
    VectorXd dn(n), en(m);
    const SpMat at = A.transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      dn(j) = 1.0 / std::sqrt(clamp_scale(std::max(col_inf_norm(P, j), col_inf_norm(A, j))));
    }
    for (Eigen::Index i = 0; i < m; ++i) en(i) = 1.0 / std::sqrt(clamp_scale(col_inf_norm(at, i)));
    P = dn.asDiagonal() * P * dn.asDiagonal();
    A = en.asDiagonal() * A * dn.asDiagonal();
    q = dn.cwiseProduct(q);
    s.d = s.d.cwiseProduct(dn);
    s.e = s.e.cwiseProduct(en);
  }
  double pmean = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) pmean += col_inf_norm(P, j);
  pmean = n > 0 ? pmean / n : 0.0;
  const double qn = q.size() > 0 ? q.lpNorm<Eigen::Infinity>() : 0.0;
  s.cost = 1.0 / clamp_scale(std::max(pmean, qn));
  P *= s.cost;
  q *= s.cost;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (l(i) > -kQpInfinity) l(i) *= s.e(i);
    if (u(i) < kQpInfinity) u(i) *= s.e(i);
  }
  return s;
}

// Solves the equality-constrained problem with rows pinned to the bound
// named in `side` (-1 lower, +1 upper, 0 free) and refines against the
// exact KKT system.
bool solve_on_active_set(const ConvexSubproblem& p, const std::vector<int>& side, VectorXd* zp,
                         VectorXd* yp) {
  const auto n = p.num_vars(), m = p.num_constraints();
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (side[i] != 0) rows.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(rows.size());
  const double delta = 1e-9;
  std::vector<Eigen::Triplet<double>> trips, exact;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (SpMat::InnerIterator it(p.P, j); it; ++it) {
      trips.emplace_back(it.row(), j, it.value());
      exact.emplace_back(it.row(), j, it.value());
    }
    trips.emplace_back(j, j, delta);
  }
  std::vector<Eigen::Index> pos(m, -1);
  for (Eigen::Index r = 0; r < k; ++r) pos[rows[r]] = r;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (SpMat::InnerIterator it(p.A, j); it; ++it) {
      const auto r = pos[it.row()];
      if (r < 0) continue;
      for (auto* t : {&trips, &exact}) {
        t->emplace_back(n + r, j, it.value());
        t->emplace_back(j, n + r, it.value());
      }
    }
  }
  for (Eigen::Index r = 0; r < k; ++r) trips.emplace_back(n + r, n + r, -delta);
  SpMat kkt(n + k, n + k), kkt_exact(n + k, n + k);
  kkt.setFromTriplets(trips.begin(), trips.end());
  kkt_exact.setFromTriplets(exact.begin(), exact.end());
  kkt.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(kkt);
  lu.factorize(kkt);
  if (lu.info() != Eigen::Success) return false;
  VectorXd rhs(n + k);
  rhs.head(n) = -p.q;
  for (Eigen::Index r = 0; r < k; ++r) {
    rhs(n + r) = side[rows[r]] < 0 ? p.l(rows[r]) : p.u(rows[r]);
  }
  VectorXd sol = lu.solve(rhs);
  for (int it = 0; it < 5; ++it) sol += lu.solve(rhs - kkt_exact * sol);
  if (!sol.allFinite()) return false;
  *zp = sol.head(n);
  *yp = VectorXd::Zero(m);
  for (Eigen::Index r = 0; r < k; ++r) (*yp)(rows[r]) = sol(n + r);
  return true;
}

// Solves on the active set guessed from an approximate primal-dual pair.
bool polish(const ConvexSubproblem& p, const VectorXd& z, const VectorXd& y, VectorXd* zp,
            VectorXd* yp) {
  const auto m = p.num_constraints();
  const VectorXd az = p.A * z;
  std::vector<int> side(m, 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (p.l(i) > -kQpInfinity && (az(i) - p.l(i) < -y(i) || p.l(i) == p.u(i))) {
      side[i] = -1;
    } else if (p.u(i) < kQpInfinity && p.u(i) - az(i) < y(i)) {
      side[i] = 1;
    }
  }
  return solve_on_active_set(p, side, zp, yp);
}

}  // namespace

QpResult solve_qp(const ConvexSubproblem& prob, double tol, int max_qp_iters,
                  const QpSettings& st, const std::optional<VectorXd>& warm_z,
                  const std::optional<VectorXd>& warm_y) {
  prob.validate();
  const auto n = prob.num_vars(), m = prob.num_constraints();

  SpMat P = prob.P, A = prob.A;
  VectorXd q = prob.q, l = prob.l, u = prob.u;
  const Scaling sc = equilibrate(P, q, A, l, u, st.scaling_iters);

  VectorXd rho(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (l(i) <= -kQpInfinity && u(i) >= kQpInfinity) {
      rho(i) = 1e-6;
    } else if (u(i) - l(i) < 1e-12 * std::max(1.0, std::abs(u(i)))) {
      rho(i) = st.rho * st.eq_rho_scale;
    } else {
      rho(i) = st.rho;
    }
  }
  SpMat id(n, n);
  id.setIdentity();
  SpMat K = P + st.sigma * id + SpMat(A.transpose() * rho.asDiagonal() * A);
  Eigen::SimplicialLDLT<SpMat> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw ContractError("qp: KKT factorization failed");

  VectorXd x = VectorXd::Zero(n), z = VectorXd::Zero(m), y = VectorXd::Zero(m);
  if (warm_z && warm_z->size() == n) {
    x = sc.d.cwiseInverse().cwiseProduct(*warm_z);
    z = A * x;
  }
  if (warm_y && warm_y->size() == m) y = sc.cost * sc.e.cwiseInverse().cwiseProduct(*warm_y);

  auto unscale = [&](const VectorXd& xs, const VectorXd& ys, VectorXd* zo, VectorXd* yo) {
    *zo = sc.d.cwiseProduct(xs);
    *yo = sc.e.cwiseProduct(ys) / sc.cost;
  };

  QpResult res;
  res.status = QpStatus::max_iter;

  // Replaces res.z/res.y by the active-set solution when that is no worse
  // in any residual.
  auto try_polish = [&](const VectorXd& z0, const VectorXd& y0) {
    VectorXd zp, yp;
    if (!polish(prob, z0, y0, &zp, &yp)) return;
    double pr0, du0, co0, pr1, du1, co1;
    qp_residuals(prob, z0, y0, &pr0, &du0, &co0);
    qp_residuals(prob, zp, yp, &pr1, &du1, &co1);
    const double pt = tol * std::max((prob.A * zp).lpNorm<Eigen::Infinity>(), 1.0);
    const double dt = tol * std::max({(prob.P * zp).lpNorm<Eigen::Infinity>(),
                                      (prob.A.transpose() * yp).lpNorm<Eigen::Infinity>(),
                                      prob.q.lpNorm<Eigen::Infinity>(), 1.0});
    // A wrong active-set guess violates an inactive row or leaves a
    // multiplier of the wrong sign; either shows up in the residuals.
    if (!(pr1 <= std::max(pr0, pt) && du1 <= std::max(du0, dt) && co1 <= std::max(co0, dt))) {
      return;
    }
    res.z = zp;
    res.y = yp;
    res.polished = true;
    if (pr1 <= pt && du1 <= dt && co1 <= dt) res.status = QpStatus::optimal;
  };

  VectorXd zo, yo;
  int iter = 0;
  for (iter = 1; iter <= max_qp_iters; ++iter) {
    const VectorXd rhs = st.sigma * x - q + A.transpose() * (rho.cwiseProduct(z) - y);
    const VectorXd xt = ldlt.solve(rhs);
    const VectorXd zt = A * xt;
    const VectorXd x_new = st.alpha * xt + (1.0 - st.alpha) * x;
    const VectorXd zr = st.alpha * zt + (1.0 - st.alpha) * z;
    const VectorXd z_new = (zr + rho.cwiseInverse().cwiseProduct(y)).cwiseMax(l).cwiseMin(u);
    const VectorXd dy = rho.cwiseProduct(zr - z_new);
    y += dy;
    x = x_new;
    z = z_new;

    if (iter % st.check_every != 0 && iter != max_qp_iters) continue;
    unscale(x, y, &zo, &yo);
    double pr, du, co;
    qp_residuals(prob, zo, yo, &pr, &du, &co);
    const double pscale = std::max((prob.A * zo).lpNorm<Eigen::Infinity>(), 1.0);
    const double dscale = std::max({(prob.P * zo).lpNorm<Eigen::Infinity>(),
                                    m > 0 ? (prob.A.transpose() * yo).lpNorm<Eigen::Infinity>() : 0.0,
                                    prob.q.lpNorm<Eigen::Infinity>(), 1.0});
    if (pr <= tol * pscale && du <= tol * dscale) {
      res.status = QpStatus::optimal;
      break;
    }
    // Primal infeasibility certificate from the multiplier increment.
    const VectorXd dyo = sc.e.cwiseProduct(dy);
    const double dyn = dyo.size() > 0 ? dyo.lpNorm<Eigen::Infinity>() : 0.0;
    if (dyn > 1e-12) {
      const double eps = st.infeasibility_tol * dyn;
      double support = 0.0;
      bool valid = true;
      for (Eigen::Index i = 0; i < m && valid; ++i) {
        if (dyo(i) > eps) {
          if (prob.u(i) >= kQpInfinity) valid = false;
          else support += prob.u(i) * dyo(i);
        } else if (dyo(i) < -eps) {
          if (prob.l(i) <= -kQpInfinity) valid = false;
          else support += prob.l(i) * dyo(i);
        }
      }
      if (valid && (prob.A.transpose() * dyo).lpNorm<Eigen::Infinity>() <= eps &&
          support < -eps) {
        res.status = QpStatus::infeasible;
        break;
      }
    }
  }
  res.iterations = std::min(iter, max_qp_iters);
  unscale(x, y, &zo, &yo);
  res.z = zo;
  res.y = yo;
  if (res.status != QpStatus::infeasible && st.polish && m > 0) try_polish(zo, yo);
  qp_residuals(prob, res.z, res.y, &res.primal_residual, &res.dual_residual, &res.complementarity);
  res.objective = prob.objective(res.z);
  return res;
}

}  // namespace stochgrasp
