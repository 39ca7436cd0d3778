#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kernelkit::cli {

// Bad configuration text or values. The CLI maps these to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& field, const std::string& what);

  int line() const { return line_; }  // 0 when no single line is responsible
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class Pipeline { rates, interp, misc, rsr, ouu, fem_check };

std::string_view pipeline_name(Pipeline p);

struct FactorConfig {
  double gamma = 1.0;
  double beta = 1.0;
  double base_resolution = 1.0;

  bool operator==(const FactorConfig&) const = default;
};

// See docs/config.md for the grammar and per-pipeline keys.
struct RunConfig {
  Pipeline pipeline = Pipeline::rates;
  std::uint64_t seed = 0;
  std::string output;

  std::vector<FactorConfig> factors;

  double kernel_beta = 2.0;
  int kernel_dim = 1;
  double length_scale = 1.0;
  int blocks = 1;
  std::string rule = "midpoint";

  int mesh_min = 3;
  int mesh_max = 6;
  int bumps = 1;
  int field_level = 5;

  int L_min = 0;
  int L_max = 0;
  int L_ref = 0;  // 0 means L_max + 2
  std::size_t eval_points = 2048;
  int replications = 5;
  int restarts = 8;

  // Number of factors the pipeline's Smolyak problem has; 0 for fem-check.
  int factor_count() const;
  int reference_level() const { return L_ref > 0 ? L_ref : L_max + 2; }

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::string_view text);

// Canonical text form; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

// FNV-1a 64 of the canonical text, output directory excluded.
std::uint64_t config_hash(const RunConfig& config);

}  // namespace kernelkit::cli
