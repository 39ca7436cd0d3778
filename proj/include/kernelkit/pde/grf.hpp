#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "kernelkit/pde/mesh.hpp"

namespace kernelkit::pde {

// One realization of the field on the nodes of the reference grid.
struct GrfSample {
  MeshLevel reference;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t draw = 0;

  // Bilinear interpolation of the nodal values; x is clamped to the unit square.
  double value_at(double x, double y) const;
};

// Centered Gaussian field on [0,1]^2 with covariance exp(-(scale |x - y|)^2),
// sampled as m = L xi with L L^T = K + nugget I on the reference grid nodes.
class GrfSampler {
 public:
  // The nugget starts at 1e-10 and is raised once to 1e-8 if the factorization fails.
  explicit GrfSampler(MeshLevel reference = MeshLevel::dyadic(5), double scale = 10.0);

  const MeshLevel& reference() const { return reference_; }
  double nugget() const { return nugget_; }
  double covariance(double r) const;

  // xi_i = CounterRng(seed, draw).normal(i): a draw is a pure function of (seed, draw).
  GrfSample sample(std::uint64_t seed, std::uint64_t draw = 0) const;

 private:
  MeshLevel reference_;
  double scale_;
  double nugget_ = 0.0;
  std::shared_ptr<const std::vector<double>> factor_;  // dense lower triangle, row-major
};

// Field values on the nodes of a mesh no finer than the reference grid, by bilinear
// interpolation. An exact copy when the meshes coincide. Throws std::invalid_argument
// for a finer mesh.
std::vector<double> restrict_field(const GrfSample& sample, const MeshLevel& coarse);

}  // namespace kernelkit::pde
