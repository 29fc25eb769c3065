#pragma once

// Self-consistent solution of the large-N contour saddle equations with
// configurable temporal gluings and record-loss profiles, plus the
// closed-form translation-invariant solutions they are validated against.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sykm/contour.hpp"
#include "sykm/model.hpp"

namespace sykm {

// Forward evaluation of the zeta relation: mu_tilde as a function of zeta.
double mu_of_zeta(double zeta, double gamma, double U_tilde);

// Root zeta of the relation. For gamma = 0 the root of
// mu_tilde = (1 + U_tilde zeta^2) sqrt(1 - zeta^2) when mu_tilde < 1, and 0
// for mu_tilde >= 1; for gamma > 0 the root in (gamma, 1). Bracketed
// bisection to 1e-12.
double zeta_of_mu(double mu_tilde, double gamma, double U_tilde);

// Number of extra grid steps appended for the record-loss strip T < t < T+T_h.
int strip_steps(const TimeGrid& grid, const ErrorProfile& err);

// Record-loss rate at slice j: gamma_bulk below T, gamma_boundary in the strip.
double gamma_at_slice(const ErrorProfile& err, const TimeGrid& grid, int j);

// Closed-form translation-invariant saddle on the grid (bulk form; identical
// blocks on contour pairs (0,1) and (2,3), no cross blocks). zeta in [0,1).
GreensTensor symmetric_saddle(const ModelParams& params, double zeta, const TimeGrid& grid);

// Equal-time block of the same closed form. branch = +1 orients the broken
// component along the record-loss-favored direction, -1 the opposite one.
Mat8 symmetric_equal_time_block(const ModelParams& params, double zeta, double gamma, int branch);

// Image of a block under the relative C4 rotation (phi1, phi2) -> (-phi2, phi1).
Mat8 c4_rotate_block(const Mat8& block);

SelfEnergy self_energy_update(const EqualTimeGreens& g, const ModelParams& params,
                              const ErrorProfile& err, const TimeGrid& grid);
SelfEnergy self_energy_update(const GreensTensor& g, const ModelParams& params,
                              const ErrorProfile& err, const TimeGrid& grid);

// G = (D - Sigma)^{-1} per site with the gluing of `bc`, materialized as the
// full two-time tensor. Exact for the discretized operator.
GreensTensor dyson_inverse(const SelfEnergy& sigma, const BoundarySpec& bc, const TimeGrid& grid);

struct SolverSeed {
  enum class Kind : std::uint8_t {
    Symmetric,
    BrokenPlus,
    BrokenMinus,
    DomainPatternA,
    DomainPatternB,
    Checkpoint,
  };
  Kind kind = Kind::Symmetric;
  std::string checkpoint_path;
  double jitter = 0.0;
  std::uint64_t jitter_seed = 0;

  static SolverSeed symmetric() { return {}; }
  static SolverSeed broken_plus() { return {Kind::BrokenPlus, {}, 0.0, 0}; }
  static SolverSeed broken_minus() { return {Kind::BrokenMinus, {}, 0.0, 0}; }
  static SolverSeed pattern_a() { return {Kind::DomainPatternA, {}, 0.0, 0}; }
  static SolverSeed pattern_b() { return {Kind::DomainPatternB, {}, 0.0, 0}; }
  static SolverSeed checkpoint(std::string path) {
    return {Kind::Checkpoint, std::move(path), 0.0, 0};
  }
  std::string name() const;
};

struct SolverConfig {
  double mixing = 0.3; // linear mixing weight in (0, 1]
  double tol = 1e-9;   // max-norm threshold on the G update
  int max_iter = 500;
  SolverSeed seed;
  bool check_final = true; // run one extra sweep for the fixed-point residual
};

struct SaddleResult {
  EqualTimeGreens g;  // equal-time blocks; the complete fixed-point state
  SelfEnergy sigma;
  cxd logdet_sum = 0.0; // sum over sites of log det of the contour operator
  double action = 0.0;  // on-shell I/N per flavor, real part
  double action_imag = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double sd_residual = 0.0; // |G - dyson(sigma(G))| after convergence
};

EqualTimeGreens seed_state(const ModelParams& params, const TimeGrid& grid,
                           const ErrorProfile& err, const BoundarySpec& bc,
                           const SolverSeed& seed);

SaddleResult solve_saddle(const ModelParams& params, const TimeGrid& grid,
                          const ErrorProfile& err, const BoundarySpec& bc,
                          const SolverConfig& cfg);

// I/N evaluated on the saddle. Raw values carry grid-dependent constants that
// cancel between runs on the same grid.
double on_shell_action(const SaddleResult& res, const ModelParams& params,
                       const ErrorProfile& err, const TimeGrid& grid);

// Complex-valued variant; the imaginary part is a numerical-residue
// diagnostic and does not require convergence.
cxd on_shell_action_cx(const SaddleResult& res, const ModelParams& params,
                       const ErrorProfile& err, const TimeGrid& grid);

struct SaddleBranch {
  std::string gluing; // "untwisted" | "twisted"
  std::string seed;
  double action = 0.0;
  double action_imag = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::shared_ptr<SaddleResult> result; // kept for checkpointing/continuation
};

struct EntropyResult {
  double S2 = 0.0;
  bool ok = false; // at least one converged saddle on each gluing
  double min_action_twisted = 0.0;
  double min_action_untwisted = 0.0;
  std::vector<SaddleBranch> branches;
};

struct SiteInterval {
  int start = 0;
  int len = 0;
};

// Quasi-2 entropy of the interval A: twisted-minus-untwisted minimum action
// over the full seed library, scaled by N_flavor. `continuation` optionally
// maps "<gluing>/<seed>" to a checkpoint path used as that branch's seed
// (cold start on any failure to load).
EntropyResult quasi_entropy(const ModelParams& params, const TimeGrid& grid,
                            const ErrorProfile& err, const SiteInterval& region,
                            const SolverConfig& cfg,
                            const std::map<std::string, std::string>& continuation = {});

struct FitResult {
  double density = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double density_stderr = 0.0;
};

// Least-squares line S2 = density*L + intercept over >= 3 points.
FitResult fit_entropy_density(const std::vector<std::pair<double, double>>& points);

}  // namespace sykm
