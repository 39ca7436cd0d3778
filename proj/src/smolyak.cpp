#include "kernelkit/smolyak.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kernelkit {

FactorSpec::FactorSpec(double gamma_, double beta_, std::string label_, double base_resolution_)
    : gamma(gamma_), beta(beta_), label(std::move(label_)), base_resolution(base_resolution_) {
  if (!(gamma > 0.0)) throw std::invalid_argument("factor '" + label + "': gamma must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("factor '" + label + "': beta must be positive");
  if (!(base_resolution > 0.0)) throw std::invalid_argument("factor '" + label + "': base resolution must be positive");
}

std::size_t level_to_resolution(const FactorSpec& factor, int level) {
  if (level < 0) throw std::invalid_argument("level must be nonnegative");
  if (level == 0) return 0;
  const double n = factor.base_resolution * std::exp(factor.t() * level);
  // Guard against exp() landing a hair above an exact integer.
  const double rounded = std::round(n);
  if (std::abs(n - rounded) <= 1e-12 * rounded) return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(n));
}

RatePrediction predicted_rates(std::span<const FactorSpec> factors) {
  if (factors.empty()) throw std::invalid_argument("predicted_rates: no factors");
  RatePrediction out;
  std::vector<double> ratio;
  for (const auto& f : factors) {
    out.g.push_back(f.gamma / (f.gamma + f.beta));
    out.b.push_back(f.beta / (f.gamma + f.beta));
    ratio.push_back(f.gamma / f.beta);
  }
  out.g_max = *std::max_element(out.g.begin(), out.g.end());
  out.b_min = *std::min_element(out.b.begin(), out.b.end());
  out.rho = *std::max_element(ratio.begin(), ratio.end());
  out.n0 = static_cast<int>(std::count_if(ratio.begin(), ratio.end(), [&](double r) {
    return std::abs(r - out.rho) <= 1e-9 * out.rho;
  }));
  return out;
}

namespace detail {

std::vector<std::size_t> resolutions_for(std::span<const FactorSpec> factors, std::span<const int> levels) {
  std::vector<std::size_t> out(levels.size());
  for (std::size_t j = 0; j < levels.size(); ++j) out[j] = level_to_resolution(factors[j], levels[j]);
  return out;
}

double term_work(std::span<const FactorSpec> factors, std::span<const std::size_t> resolutions) {
  double work = 1.0;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    work *= std::pow(static_cast<double>(resolutions[j]), factors[j].gamma);
  }
  return work;
}

void require_levels(std::size_t n, int L) {
  if (n == 0) throw std::invalid_argument("problem has no factors");
  if (L < static_cast<int>(n)) {
    throw std::invalid_argument("Smolyak level L=" + std::to_string(L) + " is below the factor count n=" +
                                std::to_string(n));
  }
}

std::size_t count_distinct(std::vector<std::vector<std::size_t>> tuples) {
  std::sort(tuples.begin(), tuples.end());
  return static_cast<std::size_t>(std::unique(tuples.begin(), tuples.end()) - tuples.begin());
}

}  // namespace detail

namespace {

double fit_slope(std::span<const std::pair<double, double>> table, double window, bool log_x) {
  if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("slope fit: window must be in (0, 1]");
  const std::size_t first =
      table.size() - static_cast<std::size_t>(std::ceil(window * static_cast<double>(table.size())));
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = first; i < table.size(); ++i) {
    const auto [x, y] = table[i];
    if (!(y > 0.0) || (log_x && !(x > 0.0))) {
      throw std::invalid_argument("slope fit: values must be positive");
    }
    pts.emplace_back(log_x ? std::log(x) : x, std::log(y));
  }
  if (pts.size() < 3) throw std::invalid_argument("slope fit: need at least 3 points");
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit: abscissae are all equal");
  return sxy / sxx;
}

}  // namespace

double fit_loglog_slope(std::span<const std::pair<double, double>> table, double window) {
  return fit_slope(table, window, true);
}

double fit_semilog_slope(std::span<const std::pair<double, double>> table, double window) {
  return fit_slope(table, window, false);
}

std::string study_csv(std::span<const StudyRow> rows) {
  std::string out = "L,work_units,evaluations,error\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.12e,%zu,%.12e\n", r.L, r.work, r.evaluations, r.error);
    out += line;
  }
  return out;
}

}  // namespace kernelkit
