// SPDX-License-Identifier: Apache-2.0

#include "ellik/linsolve.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/LU>

namespace ellik {

namespace {

Real relative_residual_of(const ComplexSparseMatrix& A, const VectorXc& x, const VectorXc& b,
                          Real b_norm) {
  if (b_norm == 0) return (A.apply(x) - b).norm();
  return (b - A.apply(x)).norm() / b_norm;
}

}  // namespace

std::pair<VectorXc, SolveReport> solve_bicgstab(const ComplexSparseMatrix& A, const VectorXc& b,
                                                const SolverConfig& config) {
  if (A.n != static_cast<int>(b.size())) throw Error("solve_bicgstab: dimension mismatch");
  if (!(config.tol > 0)) throw Error("solve_bicgstab: tol must be > 0");

  const auto t0 = std::chrono::steady_clock::now();
  const int n = A.n;
  SolveReport report;

  VectorXc inv_diag;
  if (config.precond == Preconditioner::jacobi) {
    inv_diag.resize(n);
    for (int i = 0; i < n; ++i) {
      const Complex d = A.entry(i, i);
      if (d == Complex(0, 0))
        throw Error("solve_bicgstab: Jacobi preconditioner requires a nonzero diagonal (row " +
                    std::to_string(i) + ")");
      inv_diag[i] = Complex(1, 0) / d;
    }
  }
  const auto precond = [&](const VectorXc& v) -> VectorXc {
    if (config.precond == Preconditioner::jacobi) return inv_diag.cwiseProduct(v);
    return v;
  };
  const auto finish = [&](VectorXc x, int iters, bool converged) {
    report.iterations = iters;
    report.converged = converged;
    report.relative_residual = relative_residual_of(A, x, b, b.norm());
    report.wall_seconds =
        std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
    return std::make_pair(std::move(x), report);
  };

  const Real b_norm = b.norm();
  VectorXc x = VectorXc::Zero(n);
  if (b_norm == 0) return finish(std::move(x), 0, true);

  const Real breakdown_eps = 1e-30;
  bool restarted = false;

  VectorXc r = b;  // residual for x = 0
  VectorXc r_shadow = r;
  VectorXc p = VectorXc::Zero(n), v = VectorXc::Zero(n);
  Complex rho(1, 0), alpha(1, 0), omega(1, 0);
  bool fresh = true;

  int iter = 0;
  while (iter < config.max_iter) {
    if (r.norm() <= config.tol * b_norm) {
      // Trust nothing from the recurrence: recompute before declaring victory.
      const Real true_res = relative_residual_of(A, x, b, b_norm);
      if (true_res <= config.tol) return finish(std::move(x), iter, true);
      r = b - A.apply(x);  // drifted recurrence; continue from the true residual
      r_shadow = r;
      fresh = true;
    }
    ++iter;
    const Complex rho_next = r_shadow.dot(r);  // conjugates r_shadow
    if (std::abs(rho_next) < breakdown_eps * b_norm * b_norm || std::abs(omega) < breakdown_eps) {
      if (restarted)
        throw Error("solve_bicgstab: breakdown (vanishing recurrence inner product) after restart");
      restarted = true;
      r = b - A.apply(x);
      r_shadow = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = Complex(1, 0);
      fresh = true;
      continue;
    }
    if (fresh) {
      p = r;
      fresh = false;
    } else {
      const Complex beta = (rho_next / rho) * (alpha / omega);
      p = r + beta * (p - omega * v);
    }
    rho = rho_next;
    const VectorXc p_hat = precond(p);
    v = A.apply(p_hat);
    const Complex denom = r_shadow.dot(v);
    if (std::abs(denom) < breakdown_eps * b_norm) {
      if (restarted) throw Error("solve_bicgstab: breakdown (r_shadow . v vanished) after restart");
      restarted = true;
      r = b - A.apply(x);
      r_shadow = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = Complex(1, 0);
      fresh = true;
      continue;
    }
    alpha = rho / denom;
    const VectorXc s = r - alpha * v;
    if (s.norm() <= config.tol * b_norm) {
      x += alpha * p_hat;
      const Real true_res = relative_residual_of(A, x, b, b_norm);
      if (true_res <= config.tol) return finish(std::move(x), iter, true);
      r = b - A.apply(x);
      r_shadow = r;
      fresh = true;
      continue;
    }
    const VectorXc s_hat = precond(s);
    const VectorXc t = A.apply(s_hat);
    const Real t_norm2 = t.squaredNorm();
    if (t_norm2 == 0) {
      if (restarted) throw Error("solve_bicgstab: breakdown (t = 0) after restart");
      restarted = true;
      r = b - A.apply(x);
      r_shadow = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = Complex(1, 0);
      fresh = true;
      continue;
    }
    omega = t.dot(s) / t_norm2;
    x += alpha * p_hat + omega * s_hat;
    r = s - omega * t;
  }
  return finish(std::move(x), iter, false);
}

std::pair<VectorXc, SolveReport> solve_dense(const ComplexSparseMatrix& A, const VectorXc& b,
                                             const SolverConfig& config) {
  if (A.n != static_cast<int>(b.size())) throw Error("solve_dense: dimension mismatch");
  if (A.n > config.dense_cap)
    throw Error("solve_dense: dimension " + std::to_string(A.n) + " exceeds cap " +
                std::to_string(config.dense_cap));
  const auto t0 = std::chrono::steady_clock::now();

  const MatrixXc dense = A.to_dense();
  Eigen::PartialPivLU<MatrixXc> lu(dense);
  const Real max_entry = dense.cwiseAbs().maxCoeff();
  const Real min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot <= 1e-14 * max_entry)
    throw Error("solve_dense: matrix numerically singular (pivot " + std::to_string(min_pivot) +
                ")");
  VectorXc x = lu.solve(b);

  SolveReport report;
  report.iterations = 0;
  report.relative_residual = relative_residual_of(A, x, b, b.norm());
  report.converged = true;
  report.wall_seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(x), report};
}

}  // namespace ellik
