#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kernelkit {

// A level vector l in N_+^n. Every entry is at least 1.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> levels);
  MultiIndex(std::initializer_list<int> levels);

  std::size_t size() const { return levels_.size(); }
  int operator[](std::size_t j) const { return levels_[j]; }
  std::span<const int> levels() const { return levels_; }
  int l1() const;

  std::string to_string() const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> levels_;
};

// Signed integer weight of one tensor evaluation in the combination rule.
struct CombinationTerm {
  MultiIndex index;
  std::int64_t coefficient;
};

// One inclusion-exclusion corner of a delta term. Levels may be 0; a corner with
// any 0 level is the auxiliary zero approximation and contributes nothing.
struct DeltaCorner {
  std::vector<int> levels;
  int sign;
  bool zero;
};

// Exact binomial coefficient. Rejects n > 64.
std::uint64_t binomial(int n, int k);

// All l >= 1 with |l|_1 <= L, lexicographic. Empty when L < n.
std::vector<MultiIndex> enumerate_simplex(int n, int L);

// Combination-rule terms for L-n+1 <= |l|_1 <= L with coefficients
// (-1)^(L-|l|) binom(n-1, L-|l|). Throws std::invalid_argument when L < n.
std::vector<CombinationTerm> combination_coefficients(int n, int L);

// The 2^n corners l - eps, eps in {0,1}^n, with sign (-1)^|eps|. Bit j of the
// corner number selects eps_j, so the first coordinate varies fastest.
std::vector<DeltaCorner> delta_expand(const MultiIndex& index);

// sum over |l|_1 <= L, l >= 1 of exp(g . l), and its logarithm. The log form is
// evaluated with a max shift so it never overflows.
double log_exponential_sum(std::span<const double> g, int L);
double exponential_sum(std::span<const double> g, int L);

}  // namespace kernelkit
