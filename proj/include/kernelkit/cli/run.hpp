#pragma once

#include <ostream>
#include <string>

#include "kernelkit/cli/config.hpp"

namespace kernelkit::cli {

struct RunOptions {
  unsigned workers = 1;
  bool quiet = false;
};

std::string version_string();

// Runs the configured pipeline into config.output. Writes manifest.txt first,
// then study.csv and slope.txt, plus surrogate.txt (interp, rsr, ouu) and
// optimum.txt (ouu, minimized on the reference-level surrogate). Returns 0, 1 on
// numerical failure or 2 on config/output errors; diagnostics go to `log`.
int run(const RunConfig& config, const RunOptions& options, std::ostream& log);

}  // namespace kernelkit::cli
