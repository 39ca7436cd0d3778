#include "kernelkit/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kernelkit {

MultiIndex::MultiIndex(std::vector<int> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("multi-index must have at least one entry");
  for (int l : levels_) {
    if (l < 1) throw std::invalid_argument("multi-index entries must be >= 1");
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> levels) : MultiIndex(std::vector<int>(levels)) {}

int MultiIndex::l1() const { return std::accumulate(levels_.begin(), levels_.end(), 0); }

std::string MultiIndex::to_string() const {
  std::string out = "(";
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(levels_[j]);
  }
  return out + ")";
}

std::uint64_t binomial(int n, int k) {
  if (n < 0 || n > 64) throw std::invalid_argument("binomial: n outside [0, 64]");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays exact; divide by the gcd first to avoid overflow.
    std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    std::uint64_t den = static_cast<std::uint64_t>(i);
    const std::uint64_t g1 = std::gcd(result, den);
    result /= g1;
    den /= g1;
    num /= den;
    result *= num;
  }
  return result;
}

namespace {

template <class Visit>
void visit_simplex(int n, int L, Visit&& visit) {
  if (n < 1) throw std::invalid_argument("simplex dimension must be >= 1");
  if (L < n) return;
  std::vector<int> levels(static_cast<std::size_t>(n), 1);
  // Odometer over the last coordinate fastest, keeping |l|_1 <= L.
  int sum = n;
  while (true) {
    visit(levels);
    int j = n - 1;
    while (j >= 0) {
      if (sum < L) {
        ++levels[j];
        ++sum;
        break;
      }
      sum -= levels[j] - 1;
      levels[j] = 1;
      --j;
    }
    if (j < 0) return;
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_simplex(int n, int L) {
  if (n < 1) throw std::invalid_argument("simplex dimension must be >= 1");
  if (n + L > 64 && L >= n) throw std::invalid_argument("n + L exceeds 64");
  std::vector<MultiIndex> out;
  visit_simplex(n, L, [&](const std::vector<int>& l) { out.emplace_back(l); });
  return out;
}

std::vector<CombinationTerm> combination_coefficients(int n, int L) {
  if (n < 1) throw std::invalid_argument("combination rule needs n >= 1");
  if (L < n) throw std::invalid_argument("combination rule needs L >= n (empty simplex)");
  if (n + L > 64) throw std::invalid_argument("n + L exceeds 64");
  std::vector<CombinationTerm> out;
  visit_simplex(n, L, [&](const std::vector<int>& l) {
    const int gap = L - std::accumulate(l.begin(), l.end(), 0);
    if (gap > n - 1) return;
    const auto magnitude = static_cast<std::int64_t>(binomial(n - 1, gap));
    out.push_back({MultiIndex(l), gap % 2 == 0 ? magnitude : -magnitude});
  });
  return out;
}

std::vector<DeltaCorner> delta_expand(const MultiIndex& index) {
  const std::size_t n = index.size();
  if (n == 0 || n > 30) throw std::invalid_argument("delta_expand: unsupported index length");
  std::vector<DeltaCorner> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    DeltaCorner corner{std::vector<int>(index.levels().begin(), index.levels().end()), 1, false};
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (std::size_t{1} << j)) {
        --corner.levels[j];
        corner.sign = -corner.sign;
        if (corner.levels[j] == 0) corner.zero = true;
      }
    }
    out.push_back(std::move(corner));
  }
  return out;
}

double log_exponential_sum(std::span<const double> g, int L) {
  const int n = static_cast<int>(g.size());
  for (double gj : g) {
    if (!(gj > 0.0)) throw std::invalid_argument("exponential_sum: all g_j must be positive");
  }
  if (L < n) return -std::numeric_limits<double>::infinity();
  std::vector<double> exponents;
  visit_simplex(n, L, [&](const std::vector<int>& l) {
    double e = 0.0;
    for (int j = 0; j < n; ++j) e += g[j] * l[j];
    exponents.push_back(e);
  });
  const double shift = *std::max_element(exponents.begin(), exponents.end());
  double sum = 0.0;
  for (double e : exponents) sum += std::exp(e - shift);
  return shift + std::log(sum);
}

double exponential_sum(std::span<const double> g, int L) {
  const int n = static_cast<int>(g.size());
  for (double gj : g) {
    if (!(gj > 0.0)) throw std::invalid_argument("exponential_sum: all g_j must be positive");
  }
  if (L < n) return 0.0;
  // Direct summation is exact enough while every term is representable.
  constexpr double kSafeExponent = 600.0;
  double max_exponent = 0.0;
  for (int j = 0; j < n; ++j) {
    // Largest g.l on the simplex puts all spare levels on the largest g_j.
    max_exponent = std::max(max_exponent, g[j] * (L - n + 1));
  }
  max_exponent += std::accumulate(g.begin(), g.end(), 0.0);
  if (max_exponent > kSafeExponent) return std::exp(log_exponential_sum(g, L));
  double sum = 0.0;
  visit_simplex(n, L, [&](const std::vector<int>& l) {
    double e = 0.0;
    for (int j = 0; j < n; ++j) e += g[j] * l[j];
    sum += std::exp(e);
  });
  return sum;
}

}  // namespace kernelkit
