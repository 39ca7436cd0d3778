#include "kernelkit/kernel/interpolant.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kernelkit/error.hpp"
#include "kernelkit/simd/kernels.hpp"

namespace kernelkit::kernel {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kRefinementSteps = 3;

// out_i = phi(|X_i - q|) for the coordinates [offset, offset + w) of X and q.
void block_column(const MaternKernel& k, const PointSet& X, std::size_t offset, std::span<const double> q,
                  std::span<double> out) {
  const std::size_t n = X.size();
  const auto w = static_cast<std::size_t>(k.dim());
  simd::squared_distances(X.soa().subspan(offset * n, w * n), q.subspan(offset, w), out);
  k.radial_sq_inplace(out);
}

// out_i = Phi(X_i, q) for a scattered set spanning every block of the kernel.
void full_column(const TensorKernel& kernel, const PointSet& X, std::span<const double> q, std::span<double> out,
                 std::vector<double>& scratch) {
  std::fill(out.begin(), out.end(), 1.0);
  scratch.resize(X.size());
  for (const auto& b : kernel.blocks()) {
    block_column(b.kernel, X, b.offset, q, scratch);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scratch[i];
  }
}

MatrixXd block_gram(const MaternKernel& k, const PointSet& X) {
  const std::size_t n = X.size();
  MatrixXd K(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    block_column(k, X, 0, X.point(j), col);
    for (std::size_t i = 0; i < n; ++i) K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return K;
}

MatrixXd scattered_gram(const TensorKernel& kernel, const PointSet& X) {
  const std::size_t n = X.size();
  MatrixXd K(n, n);
  std::vector<double> col(n), scratch;
  for (std::size_t j = 0; j < n; ++j) {
    full_column(kernel, X, X.point(j), col, scratch);
    for (std::size_t i = 0; i < n; ++i) K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return K;
}

struct Factorization {
  Eigen::LLT<MatrixXd> llt;
  double relative_jitter = 0.0;
};

// Cholesky of K + eps * (trace/N) I for eps = 1e-12, 1e-11, ..., 1e-6.
Factorization factorize(const MatrixXd& K, const PointSet& nodes) {
  const auto n = K.rows();
  Factorization f;
  if (!K.allFinite()) throw ConditioningError(nodes.size(), nodes.min_separation());
  // Jitter would mask a coincident pair; such a system has no interpolant.
  if (nodes.size() > 1 && nodes.min_separation() == 0.0) throw ConditioningError(nodes.size(), 0.0);
  const double scale = K.trace() / static_cast<double>(n);
  for (int e = -12; e <= -6; ++e) {
    const double rel = std::pow(10.0, e);
    MatrixXd A = K;
    A.diagonal().array() += rel * scale;
    f.llt.compute(A);
    if (f.llt.info() == Eigen::Success) {
      f.relative_jitter = rel;
      return f;
    }
  }
  throw ConditioningError(nodes.size(), nodes.min_separation());
}

double max_abs(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Applies op to every mode-j fiber block of a tensor stored first-index-fastest.
// op receives a (stride x n_j) column-major block whose rows are fibers.
template <class Op>
void for_mode(std::vector<double>& data, const std::vector<std::size_t>& dims, std::size_t j, Op&& op) {
  std::size_t stride = 1;
  for (std::size_t i = 0; i < j; ++i) stride *= dims[i];
  const std::size_t nj = dims[j];
  const std::size_t outer = data.size() / (stride * nj);
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<MatrixXd> B(data.data() + o * stride * nj, static_cast<Eigen::Index>(stride),
                           static_cast<Eigen::Index>(nj));
    op(B);
  }
}

}  // namespace

std::vector<double> gram_matrix(const TensorKernel& kernel, const PointSet& nodes) {
  const MatrixXd K = scattered_gram(kernel, nodes);
  std::vector<double> out(static_cast<std::size_t>(K.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out.data(), K.rows(), K.cols()) = K;
  return out;
}

void Interpolant::validate_layout() const {
  if (tensor_) {
    const auto& blocks = kernel_.blocks();
    if (factor_nodes_.size() != blocks.size()) {
      throw std::invalid_argument("tensor interpolant: need one point set per kernel block");
    }
    std::size_t offset = 0;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (blocks[j].offset != offset || factor_nodes_[j].dim() != static_cast<std::size_t>(blocks[j].kernel.dim())) {
        throw std::invalid_argument("tensor interpolant: point set " + std::to_string(j) +
                                    " does not match its kernel block");
      }
      if (factor_nodes_[j].size() == 0) throw std::invalid_argument("tensor interpolant: empty factor point set");
      offset += factor_nodes_[j].dim();
    }
  } else {
    if (factor_nodes_.size() != 1 || factor_nodes_[0].dim() != kernel_.dim()) {
      throw std::invalid_argument("interpolant: node dimension does not match the kernel");
    }
    if (factor_nodes_[0].size() == 0) throw std::invalid_argument("interpolant: empty node set");
  }
}

Interpolant Interpolant::fit(TensorKernel kernel, PointSet nodes, std::span<const double> values) {
  Interpolant s;
  s.kernel_ = std::move(kernel);
  s.factor_nodes_.push_back(std::move(nodes));
  s.validate_layout();
  const PointSet& X = s.factor_nodes_[0];
  if (values.size() != X.size()) throw std::invalid_argument("fit: value count does not match node count");

  const MatrixXd K = scattered_gram(s.kernel_, X);
  const auto fact = factorize(K, X);
  const VectorXd f = Eigen::Map<const VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  VectorXd alpha = fact.llt.solve(f);
  VectorXd r = f - K * alpha;
  for (int step = 0; step < kRefinementSteps && max_abs(r) > 0.0; ++step) {
    const VectorXd next = alpha + fact.llt.solve(r);
    const VectorXd r_next = f - K * next;
    if (!(max_abs(r_next) < max_abs(r))) break;
    alpha = next;
    r = r_next;
  }
  s.alpha_.assign(alpha.data(), alpha.data() + alpha.size());
  s.native_norm_sq_ = std::max(0.0, f.dot(alpha));
  const double scale = max_abs(f);
  s.relative_residual_ = scale > 0.0 ? max_abs(r) / scale : max_abs(r);
  s.relative_jitter_ = fact.relative_jitter;
  return s;
}

Interpolant Interpolant::fit_tensor(TensorKernel kernel, std::vector<PointSet> factor_nodes,
                                    std::span<const double> values) {
  Interpolant s;
  s.kernel_ = std::move(kernel);
  s.factor_nodes_ = std::move(factor_nodes);
  s.tensor_ = true;
  s.validate_layout();

  std::vector<std::size_t> dims;
  std::size_t total = 1;
  for (const auto& X : s.factor_nodes_) {
    dims.push_back(X.size());
    total *= X.size();
  }
  if (values.size() != total) throw std::invalid_argument("fit_tensor: value count does not match grid size");

  std::vector<MatrixXd> grams;
  std::vector<Factorization> facts;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    grams.push_back(block_gram(s.kernel_.blocks()[j].kernel, s.factor_nodes_[j]));
    facts.push_back(factorize(grams.back(), s.factor_nodes_[j]));
    s.relative_jitter_ = std::max(s.relative_jitter_, facts.back().relative_jitter);
  }
  auto solve = [&](std::vector<double> rhs) {
    for (std::size_t j = 0; j < dims.size(); ++j) {
      for_mode(rhs, dims, j, [&](Eigen::Map<MatrixXd>& B) {
        const MatrixXd solved = facts[j].llt.solve(B.transpose());
        B = solved.transpose();
      });
    }
    return rhs;
  };
  auto apply = [&](std::vector<double> x) {
    for (std::size_t j = 0; j < dims.size(); ++j) {
      for_mode(x, dims, j, [&](Eigen::Map<MatrixXd>& B) { B = (B * grams[j]).eval(); });
    }
    return x;
  };
  auto residual = [&](const std::vector<double>& alpha) {
    std::vector<double> r = apply(alpha);
    for (std::size_t i = 0; i < total; ++i) r[i] = values[i] - r[i];
    return r;
  };
  auto max_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  std::vector<double> alpha = solve(std::vector<double>(values.begin(), values.end()));
  std::vector<double> r = residual(alpha);
  for (int step = 0; step < kRefinementSteps && max_of(r) > 0.0; ++step) {
    std::vector<double> next = solve(r);
    for (std::size_t i = 0; i < total; ++i) next[i] += alpha[i];
    std::vector<double> r_next = residual(next);
    if (!(max_of(r_next) < max_of(r))) break;
    alpha = std::move(next);
    r = std::move(r_next);
  }
  s.alpha_ = std::move(alpha);
  double nn = 0.0;
  for (std::size_t i = 0; i < total; ++i) nn += values[i] * s.alpha_[i];
  s.native_norm_sq_ = std::max(0.0, nn);
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  s.relative_residual_ = scale > 0.0 ? max_of(r) / scale : max_of(r);
  return s;
}

Interpolant Interpolant::from_coefficients(TensorKernel kernel, std::vector<PointSet> factor_nodes, bool tensor,
                                           std::vector<double> alpha) {
  Interpolant s;
  s.kernel_ = std::move(kernel);
  s.factor_nodes_ = std::move(factor_nodes);
  s.tensor_ = tensor;
  s.validate_layout();
  std::size_t total = 1;
  for (const auto& X : s.factor_nodes_) total *= X.size();
  if (alpha.size() != total) throw std::invalid_argument("interpolant: coefficient count does not match node count");
  s.alpha_ = std::move(alpha);
  // alpha^T K alpha through evaluations at the nodes.
  double nn = 0.0;
  for (std::size_t i = 0; i < total; ++i) nn += s.alpha_[i] * s(s.node(i));
  s.native_norm_sq_ = std::max(0.0, nn);
  return s;
}

std::vector<double> Interpolant::node(std::size_t i) const {
  if (!tensor_) {
    auto p = factor_nodes_[0].point(i);
    return {p.begin(), p.end()};
  }
  std::vector<double> x;
  x.reserve(dim());
  for (const auto& X : factor_nodes_) {
    auto p = X.point(i % X.size());
    x.insert(x.end(), p.begin(), p.end());
    i /= X.size();
  }
  return x;
}

bool Interpolant::in_domain(std::span<const double> x) const {
  if (!tensor_) return contains(factor_nodes_[0].domain(), x);
  std::size_t offset = 0;
  for (const auto& X : factor_nodes_) {
    if (!contains(X.domain(), x.subspan(offset, X.dim()))) return false;
    offset += X.dim();
  }
  return true;
}

double Interpolant::operator()(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("interpolant: query dimension mismatch");
  if (!tensor_) {
    const PointSet& X = factor_nodes_[0];
    std::vector<double> col(X.size()), scratch;
    full_column(kernel_, X, x, col, scratch);
    return simd::dot(col, alpha_);
  }
  // Contract one mode at a time, first block first.
  std::vector<double> t = alpha_;
  std::vector<double> k;
  const auto& blocks = kernel_.blocks();
  for (std::size_t j = 0; j < factor_nodes_.size(); ++j) {
    const PointSet& X = factor_nodes_[j];
    const std::size_t nj = X.size();
    k.resize(nj);
    simd::squared_distances(X.soa(), x.subspan(blocks[j].offset, X.dim()), k);
    blocks[j].kernel.radial_sq_inplace(k);
    const std::size_t rest = t.size() / nj;
    std::vector<double> next(rest);
    for (std::size_t o = 0; o < rest; ++o) {
      next[o] = simd::dot(std::span<const double>(t).subspan(o * nj, nj), k);
    }
    t = std::move(next);
  }
  return t[0];
}

double Interpolant::evaluate_direct(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("interpolant: query dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < alpha_.size(); ++i) acc += alpha_[i] * kernel_(node(i), x);
  return acc;
}

}  // namespace kernelkit::kernel
