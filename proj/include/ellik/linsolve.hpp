// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_LINSOLVE_HPP
#define ELLIK_LINSOLVE_HPP

#include <utility>

#include "ellik/assembly.hpp"
#include "ellik/types.hpp"

namespace ellik {

enum class Preconditioner { none, jacobi };

struct SolverConfig {
  Real tol = 1e-10;          // relative residual target |b - Ax| <= tol |b|
  int max_iter = 20000;
  Preconditioner precond = Preconditioner::jacobi;
  int dense_cap = 2000;      // dimension cap for the dense oracle
};

struct SolveReport {
  int iterations = 0;
  Real relative_residual = 0;  // recomputed from A, x, b, never from recurrences
  bool converged = false;
  Real wall_seconds = 0;
};

/// BiCGStab on the complex system A x = b. On breakdown (vanishing recurrence
/// inner product) the iteration restarts once from the current iterate, then
/// fails with a diagnostic. Convergence is only reported after the residual is
/// recomputed from scratch and meets the tolerance; when max_iter is exceeded
/// the current iterate is still returned with converged = false.
std::pair<VectorXc, SolveReport> solve_bicgstab(const ComplexSparseMatrix& A, const VectorXc& b,
                                                const SolverConfig& config = {});

/// Dense LU oracle (partial pivoting) for systems up to config.dense_cap
/// unknowns. Throws on numerically singular factors (pivot below
/// 1e-14 * max |entry|).
std::pair<VectorXc, SolveReport> solve_dense(const ComplexSparseMatrix& A, const VectorXc& b,
                                             const SolverConfig& config = {});

}  // namespace ellik

#endif  // ELLIK_LINSOLVE_HPP
