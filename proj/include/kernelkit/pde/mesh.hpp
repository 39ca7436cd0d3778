#pragma once

#include <array>
#include <cstddef>

namespace kernelkit::pde {

// Structured triangulation of the unit square: cells_per_axis^2 squares, each cut
// by the diagonal from its lower-left to its upper-right corner. Node (i, j) sits
// at (i h, j h) with flat index i + j * nodes_per_axis().
struct MeshLevel {
  int cells_per_axis = 1;

  // 2^level cells per axis.
  static MeshLevel dyadic(int level);
  // Mesh whose node count is closest to M: nodes per axis round(sqrt(M)), at least 3.
  static MeshLevel for_node_count(std::size_t M);

  int nodes_per_axis() const { return cells_per_axis + 1; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(nodes_per_axis()) * static_cast<std::size_t>(nodes_per_axis());
  }
  std::size_t triangle_count() const {
    return 2 * static_cast<std::size_t>(cells_per_axis) * static_cast<std::size_t>(cells_per_axis);
  }
  double h() const { return 1.0 / cells_per_axis; }
  // Longest triangle edge (the cell diagonal).
  double h_max() const;
  // Charged work of one solve: M^(3/2) with M the node count.
  double work_units() const;

  std::size_t node_index(int i, int j) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(nodes_per_axis());
  }
  std::array<double, 2> node(std::size_t index) const;
  bool on_boundary(std::size_t index) const;
  // Vertex indices of triangle t, counter-clockwise.
  std::array<std::size_t, 3> triangle(std::size_t t) const;

  bool operator==(const MeshLevel&) const = default;
};

}  // namespace kernelkit::pde
