#include "kernelkit/kernel/points.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kernelkit/simd/kernels.hpp"

namespace kernelkit::kernel {

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};

Box bounding_box(const Domain& domain) {
  return std::visit(Overloaded{[](const Box& b) { return b; },
                               [](const Disc& d) {
                                 return Box{{d.cx - d.r, d.cy - d.r}, {d.cx + d.r, d.cy + d.r}};
                               }},
                    domain);
}

std::vector<double> flatten(std::size_t dim, const std::vector<std::vector<double>>& points) {
  std::vector<double> rows;
  rows.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("point set: point dimension does not match the domain");
    rows.insert(rows.end(), p.begin(), p.end());
  }
  return rows;
}

}  // namespace

Box unit_box(std::size_t dim) { return Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

std::size_t domain_dim(const Domain& domain) {
  return std::visit(Overloaded{[](const Box& b) { return b.lo.size(); }, [](const Disc&) { return std::size_t{2}; }},
                    domain);
}

double domain_volume(const Domain& domain) {
  return std::visit(Overloaded{[](const Box& b) {
                                 double v = 1.0;
                                 for (std::size_t k = 0; k < b.lo.size(); ++k) v *= b.hi[k] - b.lo[k];
                                 return v;
                               },
                               [](const Disc& d) { return std::numbers::pi * d.r * d.r; }},
                    domain);
}

bool contains(const Domain& domain, std::span<const double> x, double tol) {
  return std::visit(Overloaded{[&](const Box& b) {
                                 if (x.size() != b.lo.size()) return false;
                                 for (std::size_t k = 0; k < x.size(); ++k) {
                                   if (x[k] < b.lo[k] - tol || x[k] > b.hi[k] + tol) return false;
                                 }
                                 return true;
                               },
                               [&](const Disc& d) {
                                 if (x.size() != 2) return false;
                                 return std::hypot(x[0] - d.cx, x[1] - d.cy) <= d.r + tol;
                               }},
                    domain);
}

std::vector<double> project(const Domain& domain, std::span<const double> x) {
  return std::visit(Overloaded{[&](const Box& b) {
                                 std::vector<double> p(x.begin(), x.end());
                                 for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::clamp(p[k], b.lo[k], b.hi[k]);
                                 return p;
                               },
                               [&](const Disc& d) {
                                 std::vector<double> p(x.begin(), x.end());
                                 const double dx = p[0] - d.cx, dy = p[1] - d.cy;
                                 const double r = std::hypot(dx, dy);
                                 if (r > d.r) {
                                   p[0] = d.cx + dx * (d.r / r);
                                   p[1] = d.cy + dy * (d.r / r);
                                 }
                                 return p;
                               }},
                    domain);
}

void validate(const Domain& domain) {
  std::visit(Overloaded{[](const Box& b) {
                          if (b.lo.empty() || b.lo.size() != b.hi.size()) {
                            throw std::invalid_argument("box: lo/hi must be nonempty and of equal length");
                          }
                          for (std::size_t k = 0; k < b.lo.size(); ++k) {
                            if (!(b.hi[k] > b.lo[k])) throw std::invalid_argument("box: need lo < hi on every axis");
                          }
                        },
                        [](const Disc& d) {
                          if (!(d.r > 0.0)) throw std::invalid_argument("disc: radius must be positive");
                        }},
             domain);
}

std::string describe(const Domain& domain) {
  char buf[64];
  return std::visit(Overloaded{[&](const Box& b) {
                                 std::string s = "box";
                                 for (std::size_t k = 0; k < b.lo.size(); ++k) {
                                   std::snprintf(buf, sizeof buf, " [%g,%g]", b.lo[k], b.hi[k]);
                                   s += buf;
                                 }
                                 return s;
                               },
                               [&](const Disc& d) {
                                 std::snprintf(buf, sizeof buf, "disc center (%g,%g) radius %g", d.cx, d.cy, d.r);
                                 return std::string(buf);
                               }},
                    domain);
}

PointSet::PointSet(Domain domain, const std::vector<std::vector<double>>& points)
    : PointSet(domain, domain_dim(domain), flatten(domain_dim(domain), points)) {}

PointSet::PointSet(Domain domain, std::size_t dim, std::vector<double> row_major)
    : domain_(std::move(domain)), dim_(dim), rows_(std::move(row_major)) {
  validate(domain_);
  if (dim_ != domain_dim(domain_)) throw std::invalid_argument("point set: dimension does not match the domain");
  if (rows_.size() % dim_ != 0) throw std::invalid_argument("point set: coordinate count is not a multiple of dim");
  size_ = rows_.size() / dim_;
  soa_.resize(rows_.size());
  for (std::size_t i = 0; i < size_; ++i) {
    if (!contains(domain_, point(i), 1e-9)) {
      throw std::invalid_argument("point set: point " + std::to_string(i) + " lies outside the " +
                                  describe(domain_));
    }
    for (std::size_t k = 0; k < dim_; ++k) soa_[k * size_ + i] = rows_[i * dim_ + k];
  }
}

PointSet PointSet::prefix(std::size_t n) const {
  if (n > size_) throw std::invalid_argument("point set: prefix longer than the set");
  return PointSet(domain_, dim_, std::vector<double>(rows_.begin(), rows_.begin() + n * dim_));
}

double PointSet::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < size_; ++i) {
    // Distances from point i to points 0..i-1 via the SoA prefix of length i.
    std::vector<double> sub(i * dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
      std::copy_n(soa_.begin() + k * size_, i, sub.begin() + k * i);
    }
    best = std::min(best, simd::min_squared_distance(sub, i, point(i)));
  }
  return std::sqrt(best);
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

PointSet generate_points(const Domain& domain, std::size_t N) {
  validate(domain);
  if (N == 0) throw std::invalid_argument("generate_points: N must be positive");
  const std::size_t dim = domain_dim(domain);
  if (dim > std::size(kPrimes)) throw std::invalid_argument("generate_points: dimension too large");
  const Box box = bounding_box(domain);
  std::vector<double> rows;
  rows.reserve(N * dim);
  std::vector<double> p(dim);
  for (std::uint64_t index = 1; rows.size() < N * dim; ++index) {
    for (std::size_t k = 0; k < dim; ++k) {
      p[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * radical_inverse(index, kPrimes[k]);
    }
    if (contains(domain, p, 0.0)) rows.insert(rows.end(), p.begin(), p.end());
  }
  return PointSet(domain, dim, std::move(rows));
}

PointSet uniform_grid(const Box& box, std::size_t per_axis) {
  validate(box);
  if (per_axis < 2) throw std::invalid_argument("uniform_grid: need at least 2 points per axis");
  const std::size_t dim = box.lo.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= per_axis;
  std::vector<double> rows(total * dim);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t ik = rest % per_axis;
      rest /= per_axis;
      const double u = static_cast<double>(ik) / static_cast<double>(per_axis - 1);
      rows[i * dim + k] = box.lo[k] + (box.hi[k] - box.lo[k]) * u;
    }
  }
  return PointSet(box, dim, std::move(rows));
}

double fill_distance(const PointSet& X, std::size_t resolution) {
  if (resolution < 32) throw std::invalid_argument("fill_distance: resolution must be at least 32");
  if (X.size() == 0) throw std::invalid_argument("fill_distance: empty point set");
  const std::size_t dim = X.dim();
  const Box box = bounding_box(X.domain());
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= resolution;
  double worst = 0.0;
  std::vector<double> y(dim);
  auto visit = [&](std::span<const double> q) {
    worst = std::max(worst, simd::min_squared_distance(X.soa(), X.size(), q));
  };
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (std::size_t k = 0; k < dim; ++k) {
      const double u = static_cast<double>(rest % resolution) / static_cast<double>(resolution - 1);
      rest /= resolution;
      y[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * u;
    }
    if (contains(X.domain(), y, 0.0)) visit(y);
  }
  if (const auto* d = std::get_if<Disc>(&X.domain())) {
    const std::size_t m = 4 * resolution;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
      const double q[2] = {d->cx + d->r * std::cos(a), d->cy + d->r * std::sin(a)};
      visit(q);
    }
  }
  return std::sqrt(worst);
}

}  // namespace kernelkit::kernel
