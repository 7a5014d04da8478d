// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ellik/assembly.hpp"

using namespace ellik;

namespace {

BoxMesh unit_cube(int divisions) {
  return build_box_mesh(Vec3::Zero(), Vec3::Ones(), Vec3i::Constant(divisions));
}

CoefficientSet coeffs_with(const BoxMesh& mesh, const Mat3& g, Real k) {
  CoefficientSet cs;
  cs.gamma.assign(mesh.cell_count(), g);
  cs.k = constant_k_field(mesh, k);
  return cs;
}

bool bitwise_equal(const ComplexSparseMatrix& a, const ComplexSparseMatrix& b) {
  if (a.n != b.n || a.row_offsets != b.row_offsets || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i].real() != b.values[i].real()) return false;
    if (a.values[i].imag() != b.values[i].imag()) return false;
  }
  return true;
}

VectorXc random_interior_vector(const BoxMesh& mesh, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<Real> uni(-1, 1);
  VectorXc w(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i)
    w[i] = mesh.is_boundary_node(i) ? Complex(0, 0) : Complex(uni(rng), uni(rng));
  return w;
}

CoefficientSet random_full_coeffs(const BoxMesh& mesh, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<Real> uni(-0.25, 0.25);
  CoefficientSet cs;
  cs.k.resize(mesh.cell_count());
  cs.gamma.resize(mesh.cell_count());
  cs.b.resize(mesh.cell_count());
  cs.b_tilde.resize(mesh.cell_count());
  cs.c.resize(mesh.cell_count());
  cs.k_is_constant = false;
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    Mat3 g = Mat3::Identity();
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) g(r, s) += uni(rng);
    cs.gamma[cell] = g;
    cs.k[cell] = 1.0 + uni(rng);
    cs.b[cell] = Vec3(uni(rng), uni(rng), uni(rng));
    cs.b_tilde[cell] = Vec3(uni(rng), uni(rng), uni(rng));
    cs.c[cell] = uni(rng);
  }
  return cs;
}

}  // namespace

TEST_CASE("single-cell stiffness block matches the exact integrals") {
  // Exact Q1 integrals on the unit cell: diagonal 1/3, edge neighbors 0,
  // face diagonals -1/12, body diagonal -1/12 (hand integration of the
  // trilinear gradients; the 2x2x2 rule is exact for these quadratics).
  const BoxMesh mesh = unit_cube(1);
  const auto A = assemble_form(mesh, coeffs_with(mesh, Mat3::Identity(), 1.0), BC::neumann);
  REQUIRE(A.n == 8);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const int shared = ((a ^ b) & 1) + ((a ^ b) >> 1 & 1) + ((a ^ b) >> 2 & 1);
      const Real expected = shared == 0 ? 1.0 / 3.0 : (shared == 1 ? 0.0 : -1.0 / 12.0);
      CHECK(A.entry(a, b).real() == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("stiffness row sums vanish and the mass total is the volume") {
  const BoxMesh mesh = build_box_mesh(Vec3::Zero(), Vec3(1.5, 1, 0.5), Vec3i(6, 4, 2));
  const auto A = assemble_form(mesh, coeffs_with(mesh, Mat3::Identity(), 1.0), BC::neumann);
  Real max_row_sum = 0;
  Complex total(0, 0);
  for (int i = 0; i < A.n; ++i) {
    Real row = 0;
    for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
      row += A.values[p].real();
      total += A.values[p];
    }
    max_row_sum = std::max(max_row_sum, std::abs(row));
  }
  CHECK(max_row_sum <= 1e-12);
  CHECK(total.imag() == doctest::Approx(0.75).epsilon(1e-12));  // k * |Omega|, k = 1
}

TEST_CASE("CSR columns strictly increase and assembly is deterministic") {
  const BoxMesh mesh = unit_cube(4);
  const auto cs = random_full_coeffs(mesh, 11);
  const auto A = assemble_form(mesh, cs, BC::dirichlet);
  for (int i = 0; i < A.n; ++i)
    for (int p = A.row_offsets[i] + 1; p < A.row_offsets[i + 1]; ++p)
      CHECK(A.cols[p - 1] < A.cols[p]);
  const auto B = assemble_form(mesh, cs, BC::dirichlet);
  CHECK(bitwise_equal(A, B));
}

TEST_CASE("adjoint coefficients assemble to the exact conjugate transpose") {
  const BoxMesh mesh = unit_cube(3);
  SUBCASE("full lower-order data, Neumann") {
    const auto cs = random_full_coeffs(mesh, 23);
    const auto A = assemble_form(mesh, cs, BC::neumann);
    const auto A_adj = assemble_form(mesh, cs.adjoint(), BC::neumann);
    CHECK(bitwise_equal(A_adj, A.conjugate_transpose()));
  }
  SUBCASE("Dirichlet elimination preserves the identity") {
    const auto cs = random_full_coeffs(mesh, 29);
    const auto A = assemble_form(mesh, cs, BC::dirichlet);
    const auto A_adj = assemble_form(mesh, cs.adjoint(), BC::dirichlet);
    CHECK(bitwise_equal(A_adj, A.conjugate_transpose()));
  }
}

TEST_CASE("conjugation symmetry under k -> -k is exact") {
  const BoxMesh mesh = unit_cube(3);
  const auto cs = coeffs_with(mesh, Mat3::Identity(), 2.5);
  const auto A = assemble_form(mesh, cs, BC::neumann);
  const auto B = assemble_form(mesh, cs.with_constant_k(-2.5), BC::neumann);
  REQUIRE(A.values.size() == B.values.size());
  for (std::size_t i = 0; i < A.values.size(); ++i) {
    CHECK(B.values[i].real() == A.values[i].real());
    CHECK(B.values[i].imag() == -A.values[i].imag());
  }
}

TEST_CASE("symmetric gamma without drift gives an exactly symmetric matrix") {
  const BoxMesh mesh = unit_cube(3);
  Mat3 g;
  g << 2, 0.3, 0, 0.3, 1.5, -0.2, 0, -0.2, 1.0;
  const auto A = assemble_form(mesh, coeffs_with(mesh, g, 4.0), BC::neumann);
  CHECK(bitwise_equal(A, A.transpose()));
}

TEST_CASE("Dirichlet elimination structure") {
  const BoxMesh mesh = unit_cube(3);
  const auto A = assemble_form(mesh, coeffs_with(mesh, Mat3::Identity(), 1.0), BC::dirichlet);
  for (int i = 0; i < A.n; ++i)
    for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
      const int j = A.cols[p];
      if (mesh.is_boundary_node(i))
        CHECK(A.values[p] == (i == j ? Complex(1, 0) : Complex(0, 0)));
      else if (mesh.is_boundary_node(j))
        CHECK(A.values[p] == Complex(0, 0));
    }
}

TEST_CASE("discrete coercivity against the unit stiffness") {
  const BoxMesh mesh = unit_cube(4);
  CoefficientSet cs;
  cs.gamma.resize(mesh.cell_count());
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const Vec3i m = mesh.cell_multi_index(cell);
    const Real scale = ((m.x() + m.y() + m.z()) % 2 == 0) ? 1.0 : 25.0;
    Mat3 g = scale * Mat3::Identity();
    g(0, 1) = 0.3 * scale;  // nonsymmetric part
    g(1, 0) = -0.3 * scale;
    cs.gamma[cell] = g;
  }
  cs.k = constant_k_field(mesh, 3.0);
  const Real nu = verify_ellipticity(cs, mesh);
  const auto A = assemble_form(mesh, cs, BC::dirichlet);
  auto unit = coeffs_with(mesh, Mat3::Identity(), 0.0);
  const auto S = assemble_form(mesh, unit, BC::dirichlet);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const VectorXc w = random_interior_vector(mesh, seed);
    const Real lhs = (w.conjugate().transpose() * A.apply(w))(0).real();
    const Real rhs = (w.conjugate().transpose() * S.apply(w))(0).real();
    CHECK(lhs >= nu * rhs * (1 - 1e-10));
  }
}

TEST_CASE("imaginary energy equals k times the unit mass quadratic form") {
  const BoxMesh mesh = unit_cube(4);
  const Real k = 7.5;
  const auto A = assemble_form(mesh, coeffs_with(mesh, Mat3::Identity(), k), BC::dirichlet);
  const auto M0 = assemble_mass(mesh, BC::neumann);
  for (unsigned seed = 3; seed <= 5; ++seed) {
    const VectorXc w = random_interior_vector(mesh, seed);
    const Real lhs = (w.conjugate().transpose() * A.apply(w))(0).imag();
    const Real rhs = k * (w.conjugate().transpose() * M0.apply(w))(0).real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("Neumann with k identically zero is rejected") {
  const BoxMesh mesh = unit_cube(2);
  CHECK_THROWS_WITH_AS(assemble_form(mesh, coeffs_with(mesh, Mat3::Identity(), 0.0), BC::neumann),
                       doctest::Contains("ill-posed"), Error);
  // Dirichlet with k = 0 stays legal (pure real elliptic problem).
  CHECK_NOTHROW(assemble_form(mesh, coeffs_with(mesh, Mat3::Identity(), 0.0), BC::dirichlet));
}

TEST_CASE("volume loads") {
  const BoxMesh mesh = unit_cube(2);
  SUBCASE("zero f gives the zero vector") {
    const auto load =
        assemble_volume_load(mesh, std::vector<Complex>(mesh.cell_count(), 0.0), BC::neumann);
    CHECK(load.norm() == 0.0);
  }
  SUBCASE("f = 1 sums to the volume under Neumann") {
    const auto load =
        assemble_volume_load(mesh, std::vector<Complex>(mesh.cell_count(), 1.0), BC::neumann);
    CHECK(load.sum().real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(load.sum().imag() == 0.0);
  }
  SUBCASE("interior node entry is 1/8 of the volume on the 8-cell cube") {
    const auto load =
        assemble_volume_load(mesh, std::vector<Complex>(mesh.cell_count(), 1.0), BC::dirichlet);
    int interior = -1;
    for (int i = 0; i < mesh.node_count(); ++i)
      if (!mesh.is_boundary_node(i)) interior = i;
    REQUIRE(interior >= 0);
    CHECK(load[interior].real() == doctest::Approx(0.125).epsilon(1e-13));
    for (int i = 0; i < mesh.node_count(); ++i)
      if (mesh.is_boundary_node(i)) CHECK(load[i] == Complex(0, 0));
  }
  SUBCASE("callable and per-cell forms agree for cellwise-constant f") {
    std::vector<Complex> f_cells(mesh.cell_count());
    for (int cell = 0; cell < mesh.cell_count(); ++cell)
      f_cells[cell] = Complex(mesh.cell_center(cell).x(), 1.0);
    const auto a = assemble_volume_load(mesh, f_cells, BC::neumann);
    int counter = 0;
    const auto b = assemble_volume_load(
        mesh,
        [&](const Vec3& x) {
          ++counter;
          const Real cx = std::floor(x.x() * 2) / 2 + 0.25;
          return Complex(cx, 1.0);
        },
        BC::neumann);
    CHECK(counter == 8 * mesh.cell_count());
    CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-14);
  }
}

TEST_CASE("point loads") {
  const BoxMesh mesh = unit_cube(2);
  int interior = -1;
  for (int i = 0; i < mesh.node_count(); ++i)
    if (!mesh.is_boundary_node(i)) interior = i;
  REQUIRE(interior >= 0);
  SUBCASE("unit coordinate vector at an interior node") {
    const auto e = assemble_point_load(mesh, interior, BC::dirichlet);
    CHECK(e[interior] == Complex(1, 0));
    CHECK(e.norm() == 1.0);
  }
  SUBCASE("pairing with nodal fields is point evaluation") {
    const auto e = assemble_point_load(mesh, interior, BC::dirichlet);
    VectorXc w = VectorXc::Random(mesh.node_count());
    CHECK(e.dot(w) == w[interior]);
  }
  SUBCASE("Dirichlet boundary pole is rejected") {
    int boundary = -1;
    for (int i = 0; i < mesh.node_count(); ++i)
      if (mesh.is_boundary_node(i)) boundary = i;
    CHECK_THROWS_AS(assemble_point_load(mesh, boundary, BC::dirichlet), Error);
    CHECK_NOTHROW(assemble_point_load(mesh, boundary, BC::neumann));
  }
}

TEST_CASE("mass matrix with Dirichlet zeroes boundary rows and columns") {
  const BoxMesh mesh = unit_cube(2);
  const auto M = assemble_mass(mesh, BC::dirichlet);
  for (int i = 0; i < M.n; ++i)
    for (int p = M.row_offsets[i]; p < M.row_offsets[i + 1]; ++p)
      if (mesh.is_boundary_node(i) || mesh.is_boundary_node(M.cols[p]))
        CHECK(M.values[p] == Complex(0, 0));
}

TEST_CASE("weighted mass total matches the weighted volume") {
  const BoxMesh mesh = unit_cube(2);
  std::vector<Real> w(mesh.cell_count());
  for (int cell = 0; cell < mesh.cell_count(); ++cell) w[cell] = cell + 1.0;
  const auto M = assemble_mass(mesh, BC::neumann, w);
  Complex total(0, 0);
  for (const auto& v : M.values) total += v;
  Real expected = 0;
  for (int cell = 0; cell < mesh.cell_count(); ++cell) expected += (cell + 1.0) * mesh.cell_volume();
  CHECK(total.real() == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("add_scaled requires matching patterns") {
  const BoxMesh mesh = unit_cube(2);
  const auto A = assemble_mass(mesh, BC::neumann);
  const auto B = assemble_mass(mesh, BC::dirichlet);
  const auto C = add_scaled(A, Complex(2, 0), B, Complex(0, 1));
  CHECK(C.n == A.n);
  const BoxMesh other = unit_cube(3);
  const auto D = assemble_mass(other, BC::neumann);
  CHECK_THROWS_AS(add_scaled(A, Complex(1, 0), D, Complex(1, 0)), Error);
}
