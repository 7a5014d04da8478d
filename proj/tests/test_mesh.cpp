// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "ellik/mesh.hpp"

using namespace ellik;

namespace {

BoxMesh unit_cube(int divisions, const std::optional<CellMask>& mask = std::nullopt) {
  return build_box_mesh(Vec3::Zero(), Vec3::Ones(), Vec3i::Constant(divisions), mask);
}

// Independent boundary oracle: an active node is interior iff all 8 cells
// incident to it exist and are active, boundary otherwise.
bool oracle_boundary(const BoxMesh& mesh, int node) {
  const Vec3 p = mesh.node_position(node);
  const Vec3 h = mesh.spacing();
  int active_incident = 0;
  for (int dz = -1; dz <= 0; ++dz)
    for (int dy = -1; dy <= 0; ++dy)
      for (int dx = -1; dx <= 0; ++dx) {
        const Vec3 center = p + Vec3((dx + 0.5) * h.x(), (dy + 0.5) * h.y(), (dz + 0.5) * h.z());
        for (int cell = 0; cell < mesh.cell_count(); ++cell)
          if ((mesh.cell_center(cell) - center).norm() < 1e-12) {
            ++active_incident;
            break;
          }
      }
  return active_incident < 8;
}

}  // namespace

TEST_CASE("2x2x2 unit cube counts") {
  const BoxMesh mesh = unit_cube(2);
  CHECK(mesh.node_count() == 27);
  CHECK(mesh.cell_count() == 8);
  CHECK(mesh.boundary_node_count() == 26);
  int interior = 0;
  for (int i = 0; i < mesh.node_count(); ++i)
    if (!mesh.is_boundary_node(i)) ++interior;
  CHECK(interior == 1);
}

TEST_CASE("1x1x1 mesh is all boundary") {
  const BoxMesh mesh = unit_cube(1);
  CHECK(mesh.node_count() == 8);
  CHECK(mesh.boundary_node_count() == 8);
}

TEST_CASE("L-shaped mask: active cells and re-entrant edge") {
  const BoxMesh mesh = unit_cube(4, make_builtin_mask("l-shape", Vec3::Zero(), Vec3::Ones()));
  CHECK(mesh.cell_count() == 48);
  // Nodes along the re-entrant edge x = y = 0.5 are boundary nodes.
  for (int iz = 0; iz <= 4; ++iz) {
    const int node = mesh.node_at(Vec3(0.5, 0.5, iz / 4.0));
    REQUIRE(node >= 0);
    CHECK(mesh.is_boundary_node(node));
  }
  // Full boundary classification against the incident-cell oracle.
  for (int i = 0; i < mesh.node_count(); ++i)
    CHECK(mesh.is_boundary_node(i) == oracle_boundary(mesh, i));
}

TEST_CASE("boundary classification matches oracle on cube-hole mask") {
  const BoxMesh mesh = unit_cube(6, make_builtin_mask("cube-hole", Vec3::Zero(), Vec3::Ones()));
  CHECK(mesh.cell_count() == 6 * 6 * 6 - 2 * 2 * 2);
  for (int i = 0; i < mesh.node_count(); ++i)
    CHECK(mesh.is_boundary_node(i) == oracle_boundary(mesh, i));
}

TEST_CASE("ball_nodes selections") {
  const BoxMesh mesh = unit_cube(4);
  const Vec3 center = Vec3::Constant(0.5);
  SUBCASE("radius 0.2 keeps only the central node") {
    const auto nodes = ball_nodes(mesh, center, 0.2);
    REQUIRE(nodes.size() == 1);
    CHECK((mesh.node_position(nodes[0]) - center).norm() == doctest::Approx(0).epsilon(1e-15));
  }
  SUBCASE("radius 10 keeps all nodes") {
    CHECK(ball_nodes(mesh, center, 10.0).size() == static_cast<std::size_t>(mesh.node_count()));
  }
  SUBCASE("radius 0.25 keeps center plus the 6 axis neighbors") {
    CHECK(ball_nodes(mesh, center, 0.25).size() == 7);
  }
  SUBCASE("ordering is by node index") {
    const auto nodes = ball_nodes(mesh, center, 0.3);
    CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  }
  SUBCASE("empty set allowed") {
    CHECK(ball_nodes(mesh, Vec3::Constant(50.0), 0.1).empty());
  }
}

TEST_CASE("node index round trip") {
  const BoxMesh mesh = build_box_mesh(Vec3(-1, 0, 2), Vec3(2, 1, 3), Vec3i(3, 4, 5));
  for (int i = 0; i < mesh.node_count(); ++i) CHECK(mesh.node_at(mesh.node_position(i)) == i);
}

TEST_CASE("active cell volumes sum to the masked measure") {
  const BoxMesh mesh = unit_cube(4, make_builtin_mask("l-shape", Vec3::Zero(), Vec3::Ones()));
  CHECK(mesh.domain_volume() == doctest::Approx(0.75).epsilon(1e-15));
  const BoxMesh full = build_box_mesh(Vec3::Zero(), Vec3(2, 1, 0.5), Vec3i(4, 2, 8));
  CHECK(full.domain_volume() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("boundary classification is stable under axis permutations") {
  // cube-hole is symmetric under coordinate permutations.
  const BoxMesh mesh = unit_cube(6, make_builtin_mask("cube-hole", Vec3::Zero(), Vec3::Ones()));
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& perm : perms) {
    for (int i = 0; i < mesh.node_count(); ++i) {
      const Vec3 p = mesh.node_position(i);
      const Vec3 q(p[perm[0]], p[perm[1]], p[perm[2]]);
      const int j = mesh.node_at(q);
      REQUIRE(j >= 0);
      CHECK(mesh.is_boundary_node(i) == mesh.is_boundary_node(j));
    }
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(build_box_mesh(Vec3::Zero(), Vec3::Ones(), Vec3i(0, 2, 2)), Error);
  CHECK_THROWS_AS(build_box_mesh(Vec3::Zero(), Vec3(1, -1, 1), Vec3i(2, 2, 2)), Error);
  // Empty active set.
  CHECK_THROWS_WITH_AS(unit_cube(2, CellMask([](const Vec3&) { return false; })),
                       doctest::Contains("empty"), Error);
  // Two opposite corner cells: disconnected, error names the unreachable cell.
  const CellMask corners = [](const Vec3& c) {
    return (c - Vec3::Constant(1.0 / 6)).norm() < 1e-9 ||
           (c - Vec3::Constant(5.0 / 6)).norm() < 1e-9;
  };
  CHECK_THROWS_WITH_AS(unit_cube(3, corners), doctest::Contains("not face-connected"), Error);
}

TEST_CASE("every active node touches an active cell") {
  const BoxMesh mesh = unit_cube(5, make_builtin_mask("l-shape", Vec3::Zero(), Vec3::Ones()));
  std::set<int> touched;
  for (int cell = 0; cell < mesh.cell_count(); ++cell)
    for (int node : mesh.cell_nodes(cell)) touched.insert(node);
  CHECK(static_cast<int>(touched.size()) == mesh.node_count());
}
