#include "kernelkit/pde/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kernelkit::pde {

MeshLevel MeshLevel::dyadic(int level) {
  if (level < 1 || level > 12) throw std::invalid_argument("mesh level must be in 1..12, got " + std::to_string(level));
  return MeshLevel{1 << level};
}

MeshLevel MeshLevel::for_node_count(std::size_t M) {
  const auto per_axis = static_cast<int>(std::lround(std::sqrt(static_cast<double>(M))));
  return MeshLevel{std::max(3, per_axis) - 1};
}

double MeshLevel::h_max() const { return std::sqrt(2.0) * h(); }

double MeshLevel::work_units() const { return std::pow(static_cast<double>(node_count()), 1.5); }

std::array<double, 2> MeshLevel::node(std::size_t index) const {
  const auto n = static_cast<std::size_t>(nodes_per_axis());
  return {static_cast<double>(index % n) / cells_per_axis, static_cast<double>(index / n) / cells_per_axis};
}

bool MeshLevel::on_boundary(std::size_t index) const {
  const auto n = static_cast<std::size_t>(nodes_per_axis());
  const std::size_t i = index % n, j = index / n;
  return i == 0 || j == 0 || i + 1 == n || j + 1 == n;
}

std::array<std::size_t, 3> MeshLevel::triangle(std::size_t t) const {
  const std::size_t cell = t / 2;
  const auto m = static_cast<std::size_t>(cells_per_axis);
  const int i = static_cast<int>(cell % m), j = static_cast<int>(cell / m);
  const std::size_t ll = node_index(i, j), lr = node_index(i + 1, j);
  const std::size_t ul = node_index(i, j + 1), ur = node_index(i + 1, j + 1);
  if (t % 2 == 0) return {ll, lr, ur};
  return {ll, ur, ul};
}

}  // namespace kernelkit::pde
