#pragma once

// Batch front-end: sweep expansion, worker pool with per-shard continuation
// seeding, CSV emission, and crash-resume from per-point caches.

#include <string>

#include "sykm/config.hpp"

namespace sykm {

struct RunOptions {
  std::string out_override;
  int workers = 1;
  bool resume = false;
  bool verbose = false;
};

// Returns the process exit code: 0 success, 2 config error (also thrown as
// Error with ErrorCode::Config), 3 solver non-convergence on >= 1 point.
int run_command(const RunConfig& cfg, const RunOptions& opt, const std::string& raw_config);

// 17-significant-digit float formatting used for every CSV cell.
std::string format_g17(double v);

}  // namespace sykm
