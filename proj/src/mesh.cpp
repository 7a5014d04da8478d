// SPDX-License-Identifier: Apache-2.0

#include "ellik/mesh.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace ellik {

namespace {

std::string multi_index_str(const Vec3i& m) {
  std::ostringstream os;
  os << "(" << m.x() << "," << m.y() << "," << m.z() << ")";
  return os.str();
}

}  // namespace

Vec3 BoxMesh::cell_center(int cell) const {
  const Vec3i m = unflatten(active_cells_[cell], cell_dims_);
  return origin_ + spacing_.cwiseProduct(m.cast<Real>() + Vec3::Constant(0.5));
}

std::array<int, 8> BoxMesh::cell_nodes(int cell) const {
  const Vec3i c = unflatten(active_cells_[cell], cell_dims_);
  std::array<int, 8> out{};
  int idx = 0;
  for (int dz = 0; dz <= 1; ++dz)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dx = 0; dx <= 1; ++dx) {
        const Vec3i n(c.x() + dx, c.y() + dy, c.z() + dz);
        out[idx++] = node_index_[flatten(n, node_dims_)];
      }
  return out;
}

int BoxMesh::node_at(const Vec3& p) const {
  Vec3i m;
  for (int d = 0; d < 3; ++d) {
    const Real t = (p[d] - origin_[d]) / spacing_[d];
    const Real r = std::round(t);
    if (std::abs(t - r) > 0.5 - 1e-12) return -1;
    if (r < 0 || r >= node_dims_[d]) return -1;
    m[d] = static_cast<int>(r);
  }
  return node_index_[flatten(m, node_dims_)];
}

BoxMesh build_box_mesh(const Vec3& origin, const Vec3& extent, const Vec3i& divisions,
                       const std::optional<CellMask>& mask) {
  for (int d = 0; d < 3; ++d) {
    if (divisions[d] < 1) throw Error("build_box_mesh: divisions must be >= 1 per axis");
    if (!(extent[d] > 0)) throw Error("build_box_mesh: extent must be > 0 per axis");
  }

  BoxMesh mesh;
  mesh.origin_ = origin;
  mesh.extent_ = extent;
  mesh.divisions_ = divisions;
  mesh.spacing_ = extent.cwiseQuotient(divisions.cast<Real>());
  mesh.cell_dims_ = divisions;
  mesh.node_dims_ = divisions + Vec3i::Ones();

  const int total_cells = mesh.cell_dims_.prod();
  const int total_nodes = mesh.node_dims_.prod();

  mesh.cell_active_.assign(total_cells, 1);
  if (mask) {
    for (int c = 0; c < total_cells; ++c) {
      const Vec3i m = BoxMesh::unflatten(c, mesh.cell_dims_);
      const Vec3 center =
          origin + mesh.spacing_.cwiseProduct(m.cast<Real>() + Vec3::Constant(0.5));
      mesh.cell_active_[c] = (*mask)(center) ? 1 : 0;
    }
  }

  mesh.cell_index_.assign(total_cells, -1);
  for (int c = 0; c < total_cells; ++c) {
    if (mesh.cell_active_[c]) {
      mesh.cell_index_[c] = static_cast<int>(mesh.active_cells_.size());
      mesh.active_cells_.push_back(c);
    }
  }
  if (mesh.active_cells_.empty()) throw Error("build_box_mesh: mask yields an empty active cell set");

  // Face-connectivity: BFS from the first active cell.
  {
    std::vector<std::uint8_t> seen(total_cells, 0);
    std::deque<int> queue;
    queue.push_back(mesh.active_cells_.front());
    seen[queue.front()] = 1;
    int reached = 0;
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      ++reached;
      const Vec3i m = BoxMesh::unflatten(c, mesh.cell_dims_);
      for (int d = 0; d < 3; ++d)
        for (int s = -1; s <= 1; s += 2) {
          Vec3i nb = m;
          nb[d] += s;
          if (nb[d] < 0 || nb[d] >= mesh.cell_dims_[d]) continue;
          const int cc = BoxMesh::flatten(nb, mesh.cell_dims_);
          if (mesh.cell_active_[cc] && !seen[cc]) {
            seen[cc] = 1;
            queue.push_back(cc);
          }
        }
    }
    if (reached != static_cast<int>(mesh.active_cells_.size())) {
      for (int c : mesh.active_cells_)
        if (!seen[c])
          throw Error("build_box_mesh: active cell set is not face-connected; first unreachable cell " +
                      multi_index_str(BoxMesh::unflatten(c, mesh.cell_dims_)));
    }
  }

  // Active nodes = nodes of active cells.
  std::vector<std::uint8_t> node_active(total_nodes, 0);
  for (int c : mesh.active_cells_) {
    const Vec3i m = BoxMesh::unflatten(c, mesh.cell_dims_);
    for (int dz = 0; dz <= 1; ++dz)
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx)
          node_active[BoxMesh::flatten(m + Vec3i(dx, dy, dz), mesh.node_dims_)] = 1;
  }
  mesh.node_index_.assign(total_nodes, -1);
  for (int n = 0; n < total_nodes; ++n) {
    if (node_active[n]) {
      mesh.node_index_[n] = static_cast<int>(mesh.active_nodes_.size());
      mesh.active_nodes_.push_back(n);
    }
  }

  // Boundary nodes: nodes of active-cell faces not shared with another active cell.
  mesh.node_boundary_.assign(mesh.active_nodes_.size(), 0);
  const int face_corners[3][4][3] = {
      // face normal x: corners vary in y,z
      {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 1}},
      {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {1, 0, 1}},
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}},
  };
  for (int c : mesh.active_cells_) {
    const Vec3i m = BoxMesh::unflatten(c, mesh.cell_dims_);
    for (int d = 0; d < 3; ++d)
      for (int s = 0; s <= 1; ++s) {
        Vec3i nb = m;
        nb[d] += (s == 0 ? -1 : 1);
        bool exposed = nb[d] < 0 || nb[d] >= mesh.cell_dims_[d];
        if (!exposed) exposed = !mesh.cell_active_[BoxMesh::flatten(nb, mesh.cell_dims_)];
        if (!exposed) continue;
        for (int k = 0; k < 4; ++k) {
          Vec3i corner = m;
          corner[d] += s;
          const int u = (d + 1) % 3, v = (d + 2) % 3;
          corner[u] += face_corners[d][k][u];
          corner[v] += face_corners[d][k][v];
          const int node = mesh.node_index_[BoxMesh::flatten(corner, mesh.node_dims_)];
          mesh.node_boundary_[node] = 1;
        }
      }
  }
  for (std::uint8_t b : mesh.node_boundary_) mesh.boundary_count_ += b;
  return mesh;
}

std::vector<int> ball_nodes(const BoxMesh& mesh, const Vec3& center, Real radius) {
  if (!(radius > 0)) throw Error("ball_nodes: radius must be > 0");
  std::vector<int> out;
  const Real r2 = radius * radius;
  for (int i = 0; i < mesh.node_count(); ++i) {
    if ((mesh.node_position(i) - center).squaredNorm() <= r2) out.push_back(i);
  }
  return out;
}

CellMask make_builtin_mask(const std::string& name, const Vec3& origin, const Vec3& extent) {
  const Vec3 mid = origin + 0.5 * extent;
  if (name == "l-shape") {
    return [mid](const Vec3& c) { return !(c.x() > mid.x() && c.y() > mid.y()); };
  }
  if (name == "cube-hole") {
    const Vec3 lo = origin + extent / 3.0, hi = origin + 2.0 * extent / 3.0;
    return [lo, hi](const Vec3& c) {
      return !(c.x() > lo.x() && c.x() < hi.x() && c.y() > lo.y() && c.y() < hi.y() &&
               c.z() > lo.z() && c.z() < hi.z());
    };
  }
  throw Error("unknown mask name: " + name + " (expected l-shape or cube-hole)");
}

}  // namespace ellik
