#pragma once

// Strict JSON run configuration: a single document with a version field;
// unknown keys anywhere are errors.

#include <optional>
#include <string>
#include <vector>

#include "sykm/model.hpp"
#include "sykm/saddle.hpp"

namespace sykm {

struct SweepAxis {
  std::string param; // mu_tilde | U_tilde | gamma_bulk | gamma_boundary | L | T | T_h
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  std::string scale = "linear"; // linear | log
  std::vector<double> values() const;
};

struct LandauBlock {
  double gamma = 0.0;       // record-loss rate feeding the field h
  double gamma_prime = 0.0; // boundary-strip rate for the threshold columns
  double T_h = 1.0;
  double eta = 0.0;
  double a = 0.0; // subsystem fraction for h*
  double e = 0.0; // erased fraction for the I2 columns
  double sym_prefactor = 1.0;
  bool h_corrected_sigma = false;
};

struct WkbBlock {
  double sigma = 1.0;
  double h = 1.0;
  double T_h = 1.0;
  double T = 1.0;
  int n_max = 8;
  int grid_points = 4000;
};

struct FramepotBlock {
  int m = 2;
  double NL = 100.0;
  std::optional<double> design_epsilon;
};

struct FitBlock {
  std::vector<std::pair<double, double>> points; // inline (L, S2)
  std::string from_csv;                          // alternative: CSV path
  std::string x_col = "L";
  std::string y_col = "S2";
  std::vector<std::string> group_by;
};

struct BoundaryBlock {
  // Per-site tag strings of 'I'/'T'; empty means derived from the region.
  std::string bottom_tags;
  std::string top_tags;
};

struct RegionBlock {
  int start = 0;
  int length = -1;        // explicit length
  double fraction = -1.0; // or a fraction of L
  int resolve(int n_sites) const;
};

struct RunConfig {
  int version = 1;
  std::string command;
  ModelParams model;
  double dt = 0.05;
  double T = -1.0;
  bool TJ_equals_L = false;
  ErrorProfile error;
  RegionBlock region;
  BoundaryBlock boundary;
  SolverConfig solver;
  std::vector<SweepAxis> sweeps;
  std::vector<double> zeta_gammas = {0.0};
  LandauBlock landau;
  WkbBlock wkb;
  FramepotBlock framepot;
  FitBlock fit;
  std::string out_csv;
  int workers = 0; // 0: resolve from --workers / SYKM_WORKERS / 1
  std::uint64_t rng_seed = 0;
  double seed_jitter = 0.0;

  TimeGrid grid_for(int n_sites) const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// JSON header used in checkpoints and row caches.
std::string run_header_json(const ModelParams& params, const TimeGrid& grid,
                            const ErrorProfile& err, const BoundarySpec& bc, int iteration,
                            double residual);

// Stable 64-bit hash of the canonical config text, for resume validation.
std::uint64_t config_hash(const std::string& json_text);

}  // namespace sykm
