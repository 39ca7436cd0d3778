#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kernelkit/kernel/interpolant.hpp"
#include "kernelkit/kernel/points.hpp"

namespace kernelkit::kernel {

// Signed linear combination of interpolants. This is the value type the engine
// accumulates for function-valued problems: += concatenates terms and *= scales
// their coefficients, so a default-constructed surrogate is the zero function.
class Surrogate {
 public:
  struct Term {
    double coefficient = 0.0;
    std::shared_ptr<const Interpolant> interpolant;
  };

  Surrogate() = default;
  explicit Surrogate(std::shared_ptr<const Interpolant> interpolant, double coefficient = 1.0);

  Surrogate& operator+=(const Surrogate& other);
  Surrogate& operator*=(double c);

  // Terms are summed in storage order.
  double operator()(std::span<const double> x) const;

  const std::vector<Term>& terms() const { return terms_; }
  // Per-factor domains of the product domain the surrogate lives on (may be empty).
  const std::vector<Domain>& domains() const { return domains_; }
  void set_domains(std::vector<Domain> domains) { domains_ = std::move(domains); }
  std::size_t dim() const;

  // Versioned text format with %.17g reals; parse(serialize()) evaluates identically.
  std::string serialize() const;
  static Surrogate parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Surrogate load(const std::filesystem::path& path);

 private:
  std::vector<Term> terms_;
  std::vector<Domain> domains_;
};

}  // namespace kernelkit::kernel
