// SPDX-License-Identifier: Apache-2.0

#include "ellik/assembly.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>

namespace ellik {

VectorXc ComplexSparseMatrix::apply(const VectorXc& x) const {
  using SpMap = Eigen::Map<const Eigen::SparseMatrix<Complex, Eigen::RowMajor, int>>;
  const SpMap map(n, n, nnz(), row_offsets.data(), cols.data(), values.data());
  return map * x;
}

MatrixXc ComplexSparseMatrix::to_dense() const {
  MatrixXc dense = MatrixXc::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int p = row_offsets[i]; p < row_offsets[i + 1]; ++p) dense(i, cols[p]) += values[p];
  return dense;
}

Complex ComplexSparseMatrix::entry(int row, int col) const {
  const auto first = cols.begin() + row_offsets[row];
  const auto last = cols.begin() + row_offsets[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return Complex(0, 0);
  return values[it - cols.begin()];
}

namespace {

ComplexSparseMatrix transpose_impl(const ComplexSparseMatrix& a, bool conjugate) {
  if (!a.structurally_symmetric)
    throw Error("transpose: requires a structurally symmetric pattern");
  ComplexSparseMatrix out;
  out.n = a.n;
  out.row_offsets = a.row_offsets;
  out.cols = a.cols;
  out.values.assign(a.values.size(), Complex(0, 0));
  for (int i = 0; i < a.n; ++i)
    for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const int j = a.cols[p];
      const auto first = out.cols.begin() + out.row_offsets[j];
      const auto last = out.cols.begin() + out.row_offsets[j + 1];
      const auto it = std::lower_bound(first, last, i);
      if (it == last || *it != i) throw Error("transpose: pattern not symmetric");
      out.values[it - out.cols.begin()] = conjugate ? std::conj(a.values[p]) : a.values[p];
    }
  return out;
}

}  // namespace

ComplexSparseMatrix ComplexSparseMatrix::conjugate_transpose() const {
  return transpose_impl(*this, true);
}

ComplexSparseMatrix ComplexSparseMatrix::transpose() const { return transpose_impl(*this, false); }

ComplexSparseMatrix add_scaled(const ComplexSparseMatrix& a, Complex alpha,
                               const ComplexSparseMatrix& b, Complex beta) {
  if (a.n != b.n || a.row_offsets != b.row_offsets || a.cols != b.cols)
    throw Error("add_scaled: matrices must share the same sparsity pattern");
  ComplexSparseMatrix out = a;
  for (std::size_t p = 0; p < out.values.size(); ++p)
    out.values[p] = alpha * a.values[p] + beta * b.values[p];
  return out;
}

Q1Basis::Q1Basis(const Vec3& spacing) {
  const Real g = 1.0 / std::sqrt(3.0);
  weight_detj = spacing.prod() / 8.0;  // unit Gauss weights, |J| = h1 h2 h3 / 8
  for (int q = 0; q < n_qp; ++q) {
    const Vec3 xi((q & 1) ? g : -g, (q & 2) ? g : -g, (q & 4) ? g : -g);
    for (int a = 0; a < n_basis; ++a) {
      const Vec3 sign((a & 1) ? 1.0 : -1.0, (a & 2) ? 1.0 : -1.0, (a & 4) ? 1.0 : -1.0);
      Real val = 1.0;
      for (int d = 0; d < 3; ++d) val *= 0.5 * (1.0 + sign[d] * xi[d]);
      value[q][a] = val;
      for (int d = 0; d < 3; ++d) {
        Real dv = 0.5 * sign[d] * (2.0 / spacing[d]);
        for (int e = 0; e < 3; ++e)
          if (e != d) dv *= 0.5 * (1.0 + sign[e] * xi[e]);
        gradient[q][a][d] = dv;
      }
    }
    for (int d = 0; d < 3; ++d) point_offset[q][d] = 0.5 * (xi[d] + 1.0) * spacing[d];
  }
}

namespace {

// Per-mesh element tables: quadrature sums independent of the coefficients.
//   stiff[a][b](r,s) = sum_q wdetj * dN_a/dx_r * dN_b/dx_s
//   mass[a][b]       = sum_q wdetj * N_a N_b
//   drift[r][a][b]   = sum_q wdetj * N_b * dN_a/dx_r
// The identities stiff[b][a] = stiff[a][b]^T and mass[b][a] = mass[a][b] hold
// bitwise (per-point products commute, accumulation order is fixed), which is
// what makes the adjoint coefficient set assemble to the exact conjugate
// transpose.
struct ElementTables {
  std::array<std::array<Mat3, 8>, 8> stiff{};
  std::array<std::array<Real, 8>, 8> mass{};
  std::array<std::array<std::array<Real, 8>, 8>, 3> drift{};

  explicit ElementTables(const Q1Basis& basis) {
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        Mat3 s = Mat3::Zero();
        Real m = 0;
        Vec3 dr = Vec3::Zero();
        for (int q = 0; q < Q1Basis::n_qp; ++q) {
          const Vec3& ga = basis.gradient[q][a];
          const Vec3& gb = basis.gradient[q][b];
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) s(r, c) += basis.weight_detj * (ga[r] * gb[c]);
          m += basis.weight_detj * (basis.value[q][a] * basis.value[q][b]);
          for (int r = 0; r < 3; ++r)
            dr[r] += basis.weight_detj * (basis.value[q][b] * ga[r]);
        }
        stiff[a][b] = s;
        mass[a][b] = m;
        for (int r = 0; r < 3; ++r) drift[r][a][b] = dr[r];
      }
  }
};

// gamma : stiff contraction, summed as a transposition-invariant tree so that
// swapping (a,b) together with gamma -> gamma^T reproduces the exact bits.
inline Real contract_gamma(const Mat3& gamma, const Mat3& s) {
  const Real p00 = gamma(0, 0) * s(0, 0), p11 = gamma(1, 1) * s(1, 1), p22 = gamma(2, 2) * s(2, 2);
  const Real p01 = gamma(0, 1) * s(0, 1), p10 = gamma(1, 0) * s(1, 0);
  const Real p02 = gamma(0, 2) * s(0, 2), p20 = gamma(2, 0) * s(2, 0);
  const Real p12 = gamma(1, 2) * s(1, 2), p21 = gamma(2, 1) * s(2, 1);
  const Real diag = (p00 + p11) + p22;
  return ((diag + (p01 + p10)) + (p02 + p20)) + (p12 + p21);
}

struct Pattern {
  std::vector<int> row_offsets;
  std::vector<int> cols;
};

Pattern build_pattern(const BoxMesh& mesh) {
  const int n = mesh.node_count();
  std::vector<std::vector<int>> row_cols(n);
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto nodes = mesh.cell_nodes(cell);
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) row_cols[nodes[a]].push_back(nodes[b]);
  }
  Pattern p;
  p.row_offsets.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& rc = row_cols[i];
    std::sort(rc.begin(), rc.end());
    rc.erase(std::unique(rc.begin(), rc.end()), rc.end());
    p.row_offsets[i + 1] = p.row_offsets[i] + static_cast<int>(rc.size());
  }
  p.cols.reserve(p.row_offsets[n]);
  for (int i = 0; i < n; ++i) p.cols.insert(p.cols.end(), row_cols[i].begin(), row_cols[i].end());
  return p;
}

inline int slot_of(const std::vector<int>& row_offsets, const std::vector<int>& cols, int row,
                   int col) {
  const auto first = cols.begin() + row_offsets[row];
  const auto last = cols.begin() + row_offsets[row + 1];
  return static_cast<int>(std::lower_bound(first, last, col) - cols.begin());
}

void eliminate_dirichlet(const BoxMesh& mesh, ComplexSparseMatrix& mat, bool identity_diagonal) {
  for (int i = 0; i < mat.n; ++i) {
    const bool bi = mesh.is_boundary_node(i);
    for (int p = mat.row_offsets[i]; p < mat.row_offsets[i + 1]; ++p) {
      const int j = mat.cols[p];
      if (bi || mesh.is_boundary_node(j))
        mat.values[p] = (bi && i == j && identity_diagonal) ? Complex(1, 0) : Complex(0, 0);
    }
  }
}

}  // namespace

ComplexSparseMatrix assemble_form(const BoxMesh& mesh, const CoefficientSet& coeffs, BC bc) {
  if (static_cast<int>(coeffs.gamma.size()) != mesh.cell_count())
    throw Error("assemble_form: gamma not defined on every active cell");
  if (static_cast<int>(coeffs.k.size()) != mesh.cell_count())
    throw Error("assemble_form: k not defined on every active cell");
  if (bc == BC::neumann && coeffs.k_all_zero())
    throw Error("assemble_form: Neumann problem with k = 0 is ill-posed (constant null vector)");

  const Q1Basis basis(mesh.spacing());
  const ElementTables tables(basis);
  Pattern pat = build_pattern(mesh);

  ComplexSparseMatrix mat;
  mat.n = mesh.node_count();
  mat.row_offsets = std::move(pat.row_offsets);
  mat.cols = std::move(pat.cols);
  mat.values.assign(mat.cols.size(), Complex(0, 0));

  const bool lower = coeffs.has_lower_order();
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto nodes = mesh.cell_nodes(cell);
    const Mat3& gamma = coeffs.gamma[cell];
    const Real kc = coeffs.k[cell];
    const Vec3 bv = (lower && !coeffs.b.empty()) ? coeffs.b[cell] : Vec3::Zero();
    const Vec3 btv = (lower && !coeffs.b_tilde.empty()) ? coeffs.b_tilde[cell] : Vec3::Zero();
    const Real cv = (lower && !coeffs.c.empty()) ? coeffs.c[cell] : 0.0;
    for (int a = 0; a < 8; ++a) {
      const int row = nodes[a];
      for (int b = 0; b < 8; ++b) {
        Real re = contract_gamma(gamma, tables.stiff[a][b]);
        if (lower) {
          Real t2 = 0, t3 = 0;
          for (int r = 0; r < 3; ++r) t2 += btv[r] * tables.drift[r][a][b];
          for (int r = 0; r < 3; ++r) t3 += bv[r] * tables.drift[r][b][a];
          re = (re + (t2 + t3)) + cv * tables.mass[a][b];
        }
        const Real im = kc * tables.mass[a][b];
        mat.values[slot_of(mat.row_offsets, mat.cols, row, nodes[b])] += Complex(re, im);
      }
    }
  }
  if (bc == BC::dirichlet) eliminate_dirichlet(mesh, mat, true);
  return mat;
}

ComplexSparseMatrix assemble_mass(const BoxMesh& mesh, BC bc, const std::vector<Real>& cell_weight) {
  if (!cell_weight.empty() && static_cast<int>(cell_weight.size()) != mesh.cell_count())
    throw Error("assemble_mass: weight size mismatch");
  const Q1Basis basis(mesh.spacing());
  const ElementTables tables(basis);
  Pattern pat = build_pattern(mesh);

  ComplexSparseMatrix mat;
  mat.n = mesh.node_count();
  mat.row_offsets = std::move(pat.row_offsets);
  mat.cols = std::move(pat.cols);
  mat.values.assign(mat.cols.size(), Complex(0, 0));

  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto nodes = mesh.cell_nodes(cell);
    const Real w = cell_weight.empty() ? 1.0 : cell_weight[cell];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        mat.values[slot_of(mat.row_offsets, mat.cols, nodes[a], nodes[b])] +=
            Complex(w * tables.mass[a][b], 0);
  }
  if (bc == BC::dirichlet) eliminate_dirichlet(mesh, mat, false);
  return mat;
}

VectorXc assemble_volume_load(const BoxMesh& mesh, const std::vector<Complex>& f_cells, BC bc) {
  if (static_cast<int>(f_cells.size()) != mesh.cell_count())
    throw Error("assemble_volume_load: f size mismatch");
  const Q1Basis basis(mesh.spacing());
  std::array<Real, 8> w{};
  for (int a = 0; a < 8; ++a)
    for (int q = 0; q < Q1Basis::n_qp; ++q) w[a] += basis.weight_detj * basis.value[q][a];

  VectorXc load = VectorXc::Zero(mesh.node_count());
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto nodes = mesh.cell_nodes(cell);
    for (int a = 0; a < 8; ++a) load[nodes[a]] += f_cells[cell] * w[a];
  }
  if (bc == BC::dirichlet) enforce_dirichlet_zeros(mesh, load);
  return load;
}

VectorXc assemble_volume_load(const BoxMesh& mesh, const std::function<Complex(const Vec3&)>& f,
                              BC bc) {
  const Q1Basis basis(mesh.spacing());
  VectorXc load = VectorXc::Zero(mesh.node_count());
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto nodes = mesh.cell_nodes(cell);
    const Vec3i m = mesh.cell_multi_index(cell);
    const Vec3 corner = mesh.origin() + mesh.spacing().cwiseProduct(m.cast<Real>());
    for (int q = 0; q < Q1Basis::n_qp; ++q) {
      const Complex fq = f(corner + basis.point_offset[q]);
      if (!std::isfinite(fq.real()) || !std::isfinite(fq.imag()))
        throw Error("assemble_volume_load: f not finite at a quadrature point");
      for (int a = 0; a < 8; ++a) load[nodes[a]] += fq * (basis.weight_detj * basis.value[q][a]);
    }
  }
  if (bc == BC::dirichlet) enforce_dirichlet_zeros(mesh, load);
  return load;
}

VectorXc assemble_point_load(const BoxMesh& mesh, int y, BC bc) {
  if (y < 0 || y >= mesh.node_count()) throw Error("assemble_point_load: node out of range");
  if (bc == BC::dirichlet && mesh.is_boundary_node(y))
    throw Error("assemble_point_load: pole on the Dirichlet boundary (G(.,y) undefined there)");
  VectorXc e = VectorXc::Zero(mesh.node_count());
  e[y] = Complex(1, 0);
  return e;
}

void enforce_dirichlet_zeros(const BoxMesh& mesh, VectorXc& x) {
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.is_boundary_node(i)) x[i] = Complex(0, 0);
}

}  // namespace ellik
