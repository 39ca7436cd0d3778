#include "kernelkit/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "kernelkit/kernel/matern.hpp"

namespace kernelkit::cli {

namespace {

std::string located(int line, const std::string& field, const std::string& what) {
  std::string out = "config error";
  if (line > 0) out += " at line " + std::to_string(line);
  if (!field.empty()) out += " (" + field + ")";
  return out + ": " + what;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"pipeline", "seed", "output"}},
      {"factors", {"gamma", "beta", "base_resolution"}},
      {"kernel", {"beta", "dim", "length_scale", "blocks", "rule"}},
      {"pde", {"mesh_min", "mesh_max", "bumps", "field_level"}},
      {"study", {"L_min", "L_max", "L_ref", "eval_points", "replications", "restarts"}},
  };
  return keys;
}

// A real, or a ratio p/q of two reals.
std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    auto p = parse_real(s.substr(0, slash));
    auto q = parse_real(s.substr(slash + 1));
    if (!p || !q || *q == 0.0) return std::nullopt;
    return *p / *q;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

class Fields {
 public:
  explicit Fields(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  const Entry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }
  int line(const std::string& key) const {
    const auto* e = find(key);
    return e ? e->line : 0;
  }

  std::string text(const std::string& key, std::string fallback) const {
    const auto* e = find(key);
    return e ? e->value : fallback;
  }

  double real(const std::string& key, double fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    auto v = parse_real(e->value);
    if (!v) throw ConfigError(e->line, key, "expected a real number, got '" + e->value + "'");
    return *v;
  }

  std::vector<double> reals(const std::string& key) const {
    const auto* e = find(key);
    if (!e) return {};
    std::vector<double> out;
    std::string_view rest = e->value;
    for (;;) {
      const auto comma = rest.find(',');
      auto v = parse_real(rest.substr(0, comma));
      if (!v) throw ConfigError(e->line, key, "expected a comma-separated list of reals, got '" + e->value + "'");
      out.push_back(*v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  template <class Int>
  Int integer(const std::string& key, Int fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    Int v{};
    const std::string_view s = e->value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(e->line, key, "expected an integer, got '" + e->value + "'");
    }
    return v;
  }

 private:
  std::map<std::string, Entry> entries_;
};

void require(bool ok, const Fields& f, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(f.line(key), key, what);
}

void validate(const RunConfig& c, const Fields& f) {
  const bool uses_factors = c.pipeline == Pipeline::rates || c.pipeline == Pipeline::misc;
  if (uses_factors) {
    require(!c.factors.empty(), f, "factors.gamma", "pipeline " + std::string(pipeline_name(c.pipeline)) +
                                                         " needs [factors] gamma and beta");
  } else {
    require(c.factors.empty(), f, "factors.gamma",
            "pipeline " + std::string(pipeline_name(c.pipeline)) + " has fixed factors; remove [factors]");
  }
  for (const auto& fc : c.factors) {
    require(fc.gamma > 0.0, f, "factors.gamma", "every gamma must be positive");
    require(fc.beta > 0.0, f, "factors.beta", "every beta must be positive");
    require(fc.base_resolution > 0.0, f, "factors.base_resolution", "every base_resolution must be positive");
  }

  require(c.kernel_beta > 0.0, f, "kernel.beta", "must be positive");
  require(c.kernel_dim >= 1 && c.kernel_dim <= 3, f, "kernel.dim", "must be 1, 2 or 3");
  require(c.length_scale > 0.0, f, "kernel.length_scale", "must be positive");
  require(c.blocks >= 1 && c.blocks <= 4, f, "kernel.blocks", "must be between 1 and 4");
  require(c.rule == "midpoint" || c.rule == "kernel", f, "kernel.rule", "must be midpoint or kernel");
  if (c.pipeline == Pipeline::interp || (c.pipeline == Pipeline::misc && c.rule == "kernel")) {
    const int dim = c.pipeline == Pipeline::misc ? 1 : c.kernel_dim;
    try {
      kernel::MaternKernel(c.kernel_beta, dim, c.length_scale);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(f.line("kernel.beta"), "kernel.beta", e.what());
    }
  }
  if (c.pipeline == Pipeline::misc) {
    require(static_cast<int>(c.factors.size()) == c.blocks + 1, f, "factors.gamma",
            "misc needs one factor per block plus the sampler factor");
  }

  require(c.mesh_min >= 1 && c.mesh_min <= 10, f, "pde.mesh_min", "must be between 1 and 10");
  require(c.mesh_max >= c.mesh_min && c.mesh_max <= 10, f, "pde.mesh_max", "must be between mesh_min and 10");
  require(c.bumps == 1 || c.bumps == 2 || c.bumps == 4, f, "pde.bumps", "must be 1, 2 or 4");
  require(c.field_level >= 2 && c.field_level <= 6, f, "pde.field_level", "must be between 2 and 6");

  if (c.pipeline != Pipeline::fem_check) {
    const int n = c.factor_count();
    require(f.find("study.L_min") != nullptr, f, "study.L_min", "required");
    require(f.find("study.L_max") != nullptr, f, "study.L_max", "required");
    require(c.L_min >= n && c.L_min <= 14, f, "study.L_min",
            "must lie in [" + std::to_string(n) + ", 14] for " + std::to_string(n) + " factors");
    require(c.L_max >= c.L_min && c.L_max <= 14, f, "study.L_max", "must lie in [L_min, 14]");
    require(c.L_ref == 0 || (c.L_ref > c.L_max && c.L_ref <= 16), f, "study.L_ref",
            "must exceed L_max and be at most 16");
  }
  require(c.eval_points >= 16 && c.eval_points <= 1000000, f, "study.eval_points", "must be in [16, 1e6]");
  require(c.replications >= 1 && c.replications <= 1000, f, "study.replications", "must be in [1, 1000]");
  require(c.restarts >= 0 && c.restarts <= 1000, f, "study.restarts", "must be in [0, 1000]");
}

std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& field, const std::string& what)
    : std::runtime_error(located(line, field, what)), line_(line), field_(field) {}

std::string_view pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::rates: return "rates";
    case Pipeline::interp: return "interp";
    case Pipeline::misc: return "misc";
    case Pipeline::rsr: return "rsr";
    case Pipeline::ouu: return "ouu";
    case Pipeline::fem_check: return "fem-check";
  }
  return "?";
}

int RunConfig::factor_count() const {
  switch (pipeline) {
    case Pipeline::rates:
    case Pipeline::misc: return static_cast<int>(factors.size());
    case Pipeline::interp: return blocks;
    case Pipeline::rsr: return bumps + 1;
    case Pipeline::ouu: return 3;
    case Pipeline::fem_check: return 0;
  }
  return 0;
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().contains(section)) throw ConfigError(line_no, section, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (section.empty()) throw ConfigError(line_no, key, "key outside any section");
    if (!known_keys().at(section).contains(key)) {
      throw ConfigError(line_no, section + "." + key, "unknown key '" + key + "' in [" + section + "]");
    }
    const std::string full = section + "." + key;
    std::string value(trim(line.substr(eq + 1)));
    if (value.empty()) throw ConfigError(line_no, full, "empty value");
    auto [it, inserted] = entries.emplace(full, Entry{value, line_no});
    if (!inserted) {
      throw ConfigError(line_no, full,
                        "duplicate key, first set at line " + std::to_string(it->second.line) + " and again at line " +
                            std::to_string(line_no));
    }
  }

  const Fields f(std::move(entries));
  RunConfig c;
  const auto* pipeline = f.find("run.pipeline");
  if (!pipeline) throw ConfigError(0, "run.pipeline", "required");
  bool found = false;
  for (auto p : {Pipeline::rates, Pipeline::interp, Pipeline::misc, Pipeline::rsr, Pipeline::ouu,
                 Pipeline::fem_check}) {
    if (pipeline->value == pipeline_name(p)) {
      c.pipeline = p;
      found = true;
    }
  }
  if (!found) {
    throw ConfigError(pipeline->line, "run.pipeline",
                      "unknown pipeline '" + pipeline->value + "' (rates, interp, misc, rsr, ouu, fem-check)");
  }
  c.seed = f.integer<std::uint64_t>("run.seed", 0);
  c.output = f.text("run.output", "");

  const auto gamma = f.reals("factors.gamma");
  const auto beta = f.reals("factors.beta");
  auto base = f.reals("factors.base_resolution");
  require(gamma.size() == beta.size(), f, "factors.beta", "gamma and beta must have the same length");
  if (base.empty()) base.assign(gamma.size(), 1.0);
  require(base.size() == gamma.size(), f, "factors.base_resolution", "must have one entry per factor");
  for (std::size_t j = 0; j < gamma.size(); ++j) c.factors.push_back({gamma[j], beta[j], base[j]});

  c.kernel_beta = f.real("kernel.beta", c.kernel_beta);
  c.kernel_dim = f.integer<int>("kernel.dim", c.kernel_dim);
  c.length_scale = f.real("kernel.length_scale", c.length_scale);
  c.blocks = f.integer<int>("kernel.blocks", c.blocks);
  c.rule = f.text("kernel.rule", c.rule);

  c.mesh_min = f.integer<int>("pde.mesh_min", c.mesh_min);
  c.mesh_max = f.integer<int>("pde.mesh_max", c.mesh_max);
  c.bumps = f.integer<int>("pde.bumps", c.bumps);
  c.field_level = f.integer<int>("pde.field_level", c.field_level);

  c.L_min = f.integer<int>("study.L_min", c.L_min);
  c.L_max = f.integer<int>("study.L_max", c.L_max);
  c.L_ref = f.integer<int>("study.L_ref", c.L_ref);
  c.eval_points = f.integer<std::size_t>("study.eval_points", c.eval_points);
  c.replications = f.integer<int>("study.replications", c.replications);
  c.restarts = f.integer<int>("study.restarts", c.restarts);

  validate(c, f);
  return c;
}

std::string serialize(const RunConfig& c) {
  std::string out;
  auto kv = [&out](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  auto list = [](const std::vector<FactorConfig>& fs, double FactorConfig::*member) {
    std::string s;
    for (std::size_t j = 0; j < fs.size(); ++j) s += (j ? ", " : "") + real_text(fs[j].*member);
    return s;
  };
  out += "[run]\n";
  kv("pipeline", std::string(pipeline_name(c.pipeline)));
  kv("seed", std::to_string(c.seed));
  if (!c.output.empty()) kv("output", c.output);
  if (!c.factors.empty()) {
    out += "\n[factors]\n";
    kv("gamma", list(c.factors, &FactorConfig::gamma));
    kv("beta", list(c.factors, &FactorConfig::beta));
    kv("base_resolution", list(c.factors, &FactorConfig::base_resolution));
  }
  out += "\n[kernel]\n";
  kv("beta", real_text(c.kernel_beta));
  kv("dim", std::to_string(c.kernel_dim));
  kv("length_scale", real_text(c.length_scale));
  kv("blocks", std::to_string(c.blocks));
  kv("rule", c.rule);
  out += "\n[pde]\n";
  kv("mesh_min", std::to_string(c.mesh_min));
  kv("mesh_max", std::to_string(c.mesh_max));
  kv("bumps", std::to_string(c.bumps));
  kv("field_level", std::to_string(c.field_level));
  out += "\n[study]\n";
  kv("L_min", std::to_string(c.L_min));
  kv("L_max", std::to_string(c.L_max));
  if (c.L_ref > 0) kv("L_ref", std::to_string(c.L_ref));
  kv("eval_points", std::to_string(c.eval_points));
  kv("replications", std::to_string(c.replications));
  kv("restarts", std::to_string(c.restarts));
  return out;
}

std::uint64_t config_hash(const RunConfig& config) {
  RunConfig keyed = config;
  keyed.output.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(keyed)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace kernelkit::cli
