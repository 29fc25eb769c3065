#pragma once

// Solver-state checkpoints. Binary layout:
//   magic "SYKM" | u32 version | u64 header length | UTF-8 JSON header |
//   float64 (re, im) pairs for G then Sigma, site-major, row-major 8x8
//   equal-time blocks per slice, little-endian.
// The equal-time blocks are the complete state of the fixed-point iteration,
// so a resumed run continues bit-exactly.

#include <string>

#include "sykm/model.hpp"

namespace sykm {

struct Checkpoint {
  std::string header_json;
  EqualTimeGreens g;
  SelfEnergy sigma;
};

void write_checkpoint(const std::string& path, const std::string& header_json,
                      const EqualTimeGreens& g, const SelfEnergy& sigma);

Checkpoint read_checkpoint(const std::string& path);

}  // namespace sykm
