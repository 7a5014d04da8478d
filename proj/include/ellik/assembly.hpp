// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_ASSEMBLY_HPP
#define ELLIK_ASSEMBLY_HPP

#include <array>
#include <functional>
#include <vector>

#include "ellik/coeffs.hpp"
#include "ellik/mesh.hpp"
#include "ellik/types.hpp"

namespace ellik {

enum class BC { dirichlet, neumann };

/// Complex matrix in compressed-sparse-row layout. Column indices are strictly
/// increasing within each row; assembled matrices keep a structurally
/// symmetric pattern (eliminated couplings are stored as explicit zeros).
/// Immutable once assembled; read-shared across threads.
struct ComplexSparseMatrix {
  int n = 0;
  std::vector<int> row_offsets;   // size n+1
  std::vector<int> cols;          // size nnz
  std::vector<Complex> values;    // size nnz
  bool structurally_symmetric = true;

  int nnz() const { return static_cast<int>(cols.size()); }

  /// y = A x.
  VectorXc apply(const VectorXc& x) const;

  /// Dense copy (oracle use; guarded by callers for size).
  MatrixXc to_dense() const;

  /// Entrywise conjugate transpose. Requires a structurally symmetric pattern,
  /// which assembly guarantees; the result reuses the same pattern.
  ComplexSparseMatrix conjugate_transpose() const;

  /// Non-conjugated transpose, same pattern requirements.
  ComplexSparseMatrix transpose() const;

  Complex entry(int row, int col) const;  // 0 when not stored
};

/// Same-pattern linear combination alpha*A + beta*B.
ComplexSparseMatrix add_scaled(const ComplexSparseMatrix& a, Complex alpha,
                               const ComplexSparseMatrix& b, Complex beta);

/// Nodal complex field on a mesh (one value per active node). Dirichlet
/// unknowns are kept in the vector as explicit zeros on boundary nodes.
struct ComplexField {
  VectorXc values;
  const BoxMesh* mesh = nullptr;
  BC bc = BC::dirichlet;
};

/// Trilinear (Q1) basis data at the 2x2x2 Gauss points of a cell, prescaled by
/// the mesh spacings. Identical for every cell of a uniform grid.
struct Q1Basis {
  static constexpr int n_qp = 8;
  static constexpr int n_basis = 8;
  Real weight_detj = 0;                           // quadrature weight * |J|
  std::array<std::array<Real, n_basis>, n_qp> value{};       // N_a(x_q)
  std::array<std::array<Vec3, n_basis>, n_qp> gradient{};    // grad N_a(x_q), physical
  std::array<Vec3, n_qp> point_offset{};          // x_q relative to cell corner

  explicit Q1Basis(const Vec3& spacing);
};

/// Discretizes the sesquilinear form of the operator with Q1 elements and
/// 2x2x2 Gauss quadrature (exact for per-cell-constant coefficients):
///   entry(i,j) = sum_cells int [ grad(phi_i)^T gamma grad(phi_j)
///                + (b~ phi_j).grad(phi_i) + (b.grad(phi_j)) phi_i + c phi_i phi_j ]
///                + i * int k phi_i phi_j.
/// Dirichlet: boundary rows/columns become identity rows with zeroed couplings.
/// Cells are accumulated in lexicographic order, so assembly is bit-deterministic
/// and the adjoint coefficient set yields the exact conjugate transpose.
/// Neumann requires k nonzero on some cell (else the system is singular).
ComplexSparseMatrix assemble_form(const BoxMesh& mesh, const CoefficientSet& coeffs, BC bc);

/// Mass-type matrix int w phi_i phi_j with per-cell real weight w (default 1).
/// For Dirichlet, boundary rows and columns are zeroed (no identity diagonal).
ComplexSparseMatrix assemble_mass(const BoxMesh& mesh, BC bc,
                                  const std::vector<Real>& cell_weight = {});

/// Load vector entry i = sum_cells int f phi_i, with f per cell or sampled at
/// the quadrature points. Dirichlet boundary entries are zeroed.
VectorXc assemble_volume_load(const BoxMesh& mesh, const std::vector<Complex>& f_cells, BC bc);
VectorXc assemble_volume_load(const BoxMesh& mesh,
                              const std::function<Complex(const Vec3&)>& f, BC bc);

/// Discrete point load at node y: the unit coordinate vector e_y (the Q1 nodal
/// basis is dual to point evaluation at nodes). For Dirichlet, y must be an
/// interior node.
VectorXc assemble_point_load(const BoxMesh& mesh, int y, BC bc);

/// Zeroes the boundary entries of a Dirichlet-eliminated solution exactly.
void enforce_dirichlet_zeros(const BoxMesh& mesh, VectorXc& x);

}  // namespace ellik

#endif  // ELLIK_ASSEMBLY_HPP
