#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace kernelkit::kernel {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  bool operator==(const Box&) const = default;
};

struct Disc {
  double cx = 0.0;
  double cy = 0.0;
  double r = 1.0;

  bool operator==(const Disc&) const = default;
};

using Domain = std::variant<Box, Disc>;

Box unit_box(std::size_t dim);
std::size_t domain_dim(const Domain& domain);
double domain_volume(const Domain& domain);
bool contains(const Domain& domain, std::span<const double> x, double tol = 1e-12);
// Closest point of the domain.
std::vector<double> project(const Domain& domain, std::span<const double> x);
// Throws std::invalid_argument on empty or inverted boxes and nonpositive radii.
void validate(const Domain& domain);
std::string describe(const Domain& domain);

// Immutable point cloud. Coordinates are kept both row-major (point access) and
// structure-of-arrays (distance kernels).
class PointSet {
 public:
  PointSet() = default;
  // Throws std::invalid_argument if a point has the wrong dimension or lies outside the domain.
  PointSet(Domain domain, const std::vector<std::vector<double>>& points);
  PointSet(Domain domain, std::size_t dim, std::vector<double> row_major);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return size_; }
  const Domain& domain() const { return domain_; }

  std::span<const double> point(std::size_t i) const { return {rows_.data() + i * dim_, dim_}; }
  double coord(std::size_t i, std::size_t k) const { return rows_[i * dim_ + k]; }
  std::span<const double> row_major() const { return rows_; }
  // Coordinate k of point i at soa()[k * size() + i].
  std::span<const double> soa() const { return soa_; }

  PointSet prefix(std::size_t n) const;
  // Smallest pairwise distance; +inf for fewer than two points.
  double min_separation() const;

 private:
  Domain domain_;
  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  std::vector<double> rows_;
  std::vector<double> soa_;
};

// First N points of the Halton sequence (bases 2, 3, 5, ...; index starting at 1)
// mapped into the domain. Disc points are the Halton points of the bounding box
// that fall inside the disc. Prefixes are nested: generate_points(D, N) is the
// first N points of generate_points(D, M) for N <= M.
PointSet generate_points(const Domain& domain, std::size_t N);

// Tensor grid with `per_axis` equispaced points per axis, boundary included.
PointSet uniform_grid(const Box& box, std::size_t per_axis);

// Radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, unsigned base);

// Largest nearest-node distance over a uniform candidate grid with `resolution`
// points per axis (plus `resolution * 4` circle points for a disc). A lower bound
// on the true fill distance that converges as resolution grows.
double fill_distance(const PointSet& X, std::size_t resolution);

}  // namespace kernelkit::kernel
