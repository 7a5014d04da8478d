// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_MESH_HPP
#define ELLIK_MESH_HPP

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "ellik/types.hpp"

namespace ellik {

/// Predicate deciding whether a cell (given its center) is part of the domain.
using CellMask = std::function<bool(const Vec3& cell_center)>;

/// Structured hexahedral mesh over an axis-aligned box, with an optional
/// cell mask carving Lipschitz subdomains (L-shapes, boxes with holes).
///
/// Nodes and cells are ordered lexicographically with x fastest. "Active"
/// nodes are the nodes incident to at least one active cell; all public
/// indices refer to the compact active numbering. Immutable after
/// construction and safe to share read-only across threads.
class BoxMesh {
 public:
  const Vec3& origin() const { return origin_; }
  const Vec3& extent() const { return extent_; }
  const Vec3i& divisions() const { return divisions_; }
  const Vec3& spacing() const { return spacing_; }
  Real max_spacing() const { return spacing_.maxCoeff(); }
  Real min_extent() const { return extent_.minCoeff(); }

  /// Number of active nodes.
  int node_count() const { return static_cast<int>(active_nodes_.size()); }
  /// Number of active cells.
  int cell_count() const { return static_cast<int>(active_cells_.size()); }
  /// Volume of a single cell (uniform over the grid).
  Real cell_volume() const { return spacing_.prod(); }
  /// Exact measure of the active domain.
  Real domain_volume() const { return cell_volume() * cell_count(); }

  Vec3 node_position(int node) const { return grid_node_position(active_nodes_[node]); }
  Vec3 cell_center(int cell) const;

  bool is_boundary_node(int node) const { return node_boundary_[node] != 0; }
  int boundary_node_count() const { return boundary_count_; }

  /// The 8 active-node indices of a cell, in lexicographic corner order.
  std::array<int, 8> cell_nodes(int cell) const;

  /// Active-node index of the grid node nearest to `p`, or -1 if that grid
  /// node is inactive or `p` lies farther than half a spacing from it.
  int node_at(const Vec3& p) const;

  /// Grid multi-index of an active node (useful for diagnostics and export).
  Vec3i node_multi_index(int node) const { return unflatten(active_nodes_[node], node_dims_); }
  Vec3i cell_multi_index(int cell) const { return unflatten(active_cells_[cell], cell_dims_); }

  /// Grid dimensions of the full (unmasked) node lattice.
  Vec3i node_grid_dims() const { return node_dims_; }
  /// Active-node index for a full-grid node linear index, or -1.
  int active_node_of_grid(int grid_linear) const { return node_index_[grid_linear]; }

  friend BoxMesh build_box_mesh(const Vec3&, const Vec3&, const Vec3i&,
                                const std::optional<CellMask>&);

 private:
  static int flatten(const Vec3i& m, const Vec3i& dims) {
    return m.x() + dims.x() * (m.y() + dims.y() * m.z());
  }
  static Vec3i unflatten(int linear, const Vec3i& dims) {
    return Vec3i(linear % dims.x(), (linear / dims.x()) % dims.y(),
                 linear / (dims.x() * dims.y()));
  }
  Vec3 grid_node_position(int grid_linear) const {
    const Vec3i m = unflatten(grid_linear, node_dims_);
    return origin_ + spacing_.cwiseProduct(m.cast<Real>());
  }

  Vec3 origin_{Vec3::Zero()};
  Vec3 extent_{Vec3::Ones()};
  Vec3i divisions_{Vec3i::Ones()};
  Vec3 spacing_{Vec3::Ones()};
  Vec3i node_dims_{Vec3i::Zero()};
  Vec3i cell_dims_{Vec3i::Zero()};

  std::vector<std::uint8_t> cell_active_;  // full grid, per cell
  std::vector<int> node_index_;            // full grid node -> active index or -1
  std::vector<int> cell_index_;            // full grid cell -> active index or -1
  std::vector<int> active_nodes_;          // active index -> full grid node
  std::vector<int> active_cells_;          // active index -> full grid cell
  std::vector<std::uint8_t> node_boundary_;  // per active node
  int boundary_count_ = 0;
};

/// Builds a mesh over [origin, origin+extent] with `divisions` cells per axis.
/// A mask, when given, selects the active cells by center; the active set must
/// be nonempty and face-connected.
BoxMesh build_box_mesh(const Vec3& origin, const Vec3& extent, const Vec3i& divisions,
                       const std::optional<CellMask>& mask = std::nullopt);

/// Active nodes with |x - center| <= radius (closed ball), ordered by index.
std::vector<int> ball_nodes(const BoxMesh& mesh, const Vec3& center, Real radius);

/// Builtin masks for the CLI and tests. "l-shape" removes the quadrant
/// x > mid_x && y > mid_y (re-entrant edge along z); "cube-hole" removes a
/// centered box of one third the extent per axis.
CellMask make_builtin_mask(const std::string& name, const Vec3& origin, const Vec3& extent);

}  // namespace ellik

#endif  // ELLIK_MESH_HPP
