#pragma once

// Closed-form effective Z4 theory: coefficient mapping, line tension,
// domain-wall free energies, pinning/erasure thresholds, and the piecewise
// quasi-2 mutual information (standard and Hayden-Preskill variants).

#include <vector>

#include "sykm/common.hpp"
#include "sykm/model.hpp"

namespace sykm {

struct LandauCoeffs {
  double r = 0.0;            // mu (mu - J) / 2
  double lambda = 0.0;       // mu^{5/2} / (4 sqrt(2J))
  double lambda_prime = 0.0; // -2 (U/J) lambda
  double h = 0.0;            // gamma mu^{7/4} J^{1/4} / 2^{5/4}
};

struct WallGeometry {
  double T_h = 0.0; // field-strip width
  double a = 0.0;   // subsystem fraction L_A / L
  double eta = 0.0; // encoded fraction
  double e = 0.0;   // erased fraction
  int n_sites = 0;
  int n_flavor = 1;
};

LandauCoeffs effective_coeffs(const ModelParams& params, double gamma);

// The field generated by a record-loss rate gamma.
double gamma_to_field(const ModelParams& params, double gamma);

// Perturbative line tension; the r-dependent term applies for r <= 0 and is
// dropped otherwise. Requires lambda_prime < 0.
double line_tension(const LandauCoeffs& c);

enum class WallKind { A, B };

// Leading free energy of a wall with endpoint separation x.
double wall_free_energy(WallKind kind, double x, double sigma, double h,
                        const WallGeometry& geom);

// Pinning field h* = ((2a-1)/a) sigma/T_h; requires a > 1/2.
double pinning_field(const WallGeometry& geom, double sigma);

struct ThresholdResult {
  double e_c = 0.0;
  bool clamped = false; // raw solution fell outside [0, (1-eta)/2] (or [0,1-eta])
  double raw = 0.0;
};

// Erasure threshold from h T_h (1 - e_c) = sigma (1 - 2 e_c - eta).
ThresholdResult erasure_threshold(double h, double T_h, double sigma, double eta);

// Hayden-Preskill variant: h T_h (1 - e_c) = 2 sigma (1 - e_c - eta).
ThresholdResult hp_threshold(double h, double T_h, double sigma, double eta);

// Piecewise quasi-2 mutual information I(R; E'B').
double mutual_information(double e, const WallGeometry& geom, double sigma, double h);
double hp_mutual_information(double e, const WallGeometry& geom, double sigma, double h);

// Symmetric-phase (r > 0) wall scale sigma_sym = c_prefactor * h / sqrt(r);
// the prefactor is not fixed by the effective theory.
double symmetric_phase_tension(const LandauCoeffs& c, double c_prefactor);

struct ThresholdPoint {
  double mu_tilde = 0.0;
  double sigma = 0.0;
  double h = 0.0;
  double e_c = 0.0;
  bool clamped = false;
  bool valid = false; // r <= 0 so the zero-field tension applies
};

// e_c(mu_tilde) with the zero-field tension (the field enters only through
// gamma_prime); set `h_corrected_sigma` to include the field term of the
// tension instead.
std::vector<ThresholdPoint> threshold_curve(const std::vector<double>& mu_tildes, double eta,
                                            double gamma_prime, double T_h,
                                            const ModelParams& params,
                                            bool h_corrected_sigma = false);

}  // namespace sykm
