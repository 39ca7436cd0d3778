#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "kernelkit/cli/run.hpp"
#include "kernelkit/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sparse Smolyak approximation experiments"};
  app.set_version_flag("--version", kernelkit::cli::version_string());
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  std::string workers_arg = "max";
  bool quiet = false;
  app.add_option("--config", config_path, "INI-style run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides [run] output)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides [run] seed)");
  app.add_option("--workers", workers_arg, "Worker threads, a positive count or 'max' (default)")
      ->check(CLI::IsMember({"max"}) | CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "config error: cannot read " << config_path << "\n";
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();

  kernelkit::cli::RunConfig config;
  try {
    config = kernelkit::cli::parse_config(text.str());
  } catch (const kernelkit::cli::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  }
  const unsigned workers =
      workers_arg == "max" ? kernelkit::hardware_workers() : static_cast<unsigned>(std::stoul(workers_arg));
  if (*out_opt) config.output = out_dir;
  if (*seed_opt) config.seed = seed;
  return kernelkit::cli::run(config, {workers, quiet}, std::cerr);
}
