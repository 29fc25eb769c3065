#include "sykm/landau.hpp"

#include <cmath>

namespace sykm {

LandauCoeffs effective_coeffs(const ModelParams& p, double gamma) {
  LandauCoeffs c;
  c.r = 0.5 * p.mu * (p.mu - p.J);
  c.lambda = std::pow(p.mu, 2.5) / (4.0 * std::sqrt(2.0 * p.J));
  c.lambda_prime = -2.0 * p.U_tilde * c.lambda;
  c.h = gamma * std::pow(p.mu, 1.75) * std::pow(p.J, 0.25) / std::pow(2.0, 1.25);
  return c;
}

double gamma_to_field(const ModelParams& p, double gamma) {
  return gamma * std::pow(p.mu, 1.75) * std::pow(p.J, 0.25) / std::pow(2.0, 1.25);
}

double line_tension(const LandauCoeffs& c) {
  if (!(c.lambda_prime < 0.0))
    throw domain_error("line_tension: lambda' must be negative for distinct Z4 minima");
  double sigma = (M_PI - 2.0) / std::sqrt(-2.0 * c.lambda_prime) * c.h;
  if (c.r <= 0.0 && c.lambda + c.lambda_prime > 0.0) {
    sigma += M_PI * std::sqrt(-c.lambda_prime) / 8.0 *
             std::pow(-c.r / (c.lambda + c.lambda_prime), 1.5);
  }
  return sigma;
}

double wall_free_energy(WallKind kind, double x, double sigma, double h,
                        const WallGeometry& geom) {
  if (x < 0) throw domain_error("wall_free_energy: x must be >= 0");
  double f = geom.n_flavor * sigma * x;
  if (kind == WallKind::B) f -= geom.n_flavor * h * geom.T_h * x;
  return f;
}

double pinning_field(const WallGeometry& geom, double sigma) {
  if (!(geom.a > 0.5))
    throw domain_error("pinning_field: requires a > 1/2 (L_A > L_Abar)");
  if (!(geom.T_h > 0)) throw domain_error("pinning_field: requires T_h > 0");
  return (2.0 * geom.a - 1.0) / geom.a * sigma / geom.T_h;
}

namespace {

ThresholdResult clamp_threshold(double raw, double hi) {
  ThresholdResult t;
  t.raw = raw;
  t.e_c = raw;
  if (raw < 0.0) {
    t.e_c = 0.0;
    t.clamped = true;
  } else if (raw > hi) {
    t.e_c = hi;
    t.clamped = true;
  }
  return t;
}

}  // namespace

ThresholdResult erasure_threshold(double h, double T_h, double sigma, double eta) {
  if (!(sigma > 0)) throw domain_error("erasure_threshold: sigma must be > 0");
  double hTh = h * T_h;
  if (hTh == 0.0) return clamp_threshold(0.5 * (1.0 - eta), 0.5 * (1.0 - eta));
  double den = 2.0 * sigma - hTh;
  if (den == 0.0) throw domain_error("erasure_threshold: degenerate denominator 2 sigma = h T_h");
  double raw = (sigma * (1.0 - eta) - hTh) / den;
  return clamp_threshold(raw, 0.5 * (1.0 - eta));
}

ThresholdResult hp_threshold(double h, double T_h, double sigma, double eta) {
  if (!(sigma > 0)) throw domain_error("hp_threshold: sigma must be > 0");
  double hTh = h * T_h;
  if (hTh == 0.0) return clamp_threshold(1.0 - eta, 1.0 - eta);
  double den = 2.0 * sigma - hTh;
  if (den == 0.0) throw domain_error("hp_threshold: degenerate denominator 2 sigma = h T_h");
  double raw = (2.0 * sigma * (1.0 - eta) - hTh) / den;
  return clamp_threshold(raw, 1.0 - eta);
}

double mutual_information(double e, const WallGeometry& geom, double sigma, double h) {
  if (!(sigma > 0)) throw domain_error("mutual_information: sigma must be > 0");
  const double NL = double(geom.n_flavor) * geom.n_sites;
  double hTh = h * geom.T_h;
  double den = 2.0 * sigma - hTh;
  if (den == 0.0) return 2.0 * NL * sigma * geom.eta; // both breakpoints merge at e -> 1
  double e_c = (sigma * (1.0 - geom.eta) - hTh) / den;
  double e_star = (sigma * (1.0 + geom.eta) - hTh) / den;
  if (e < e_c) return 0.0;
  if (e < e_star) return NL * (sigma * (geom.eta + 2.0 * e - 1.0) + hTh * (1.0 - e));
  return 2.0 * NL * sigma * geom.eta;
}

double hp_mutual_information(double e, const WallGeometry& geom, double sigma, double h) {
  if (!(sigma > 0)) throw domain_error("hp_mutual_information: sigma must be > 0");
  const double NL = double(geom.n_flavor) * geom.n_sites;
  double hTh = h * geom.T_h;
  // pinning fields of S_{E'B'R} and S_{E'B'}
  double h_star = (1.0 - e) > 0 ? 2.0 * sigma / geom.T_h * (1.0 - e - geom.eta) / (1.0 - e)
                                : 0.0;
  double h_star2 = 2.0 * sigma / geom.T_h;
  if (h <= h_star) return 0.0;
  if (h < h_star2) return NL * (2.0 * sigma * (geom.eta + e - 1.0) + hTh * (1.0 - e));
  return 2.0 * NL * sigma * geom.eta;
}

double symmetric_phase_tension(const LandauCoeffs& c, double c_prefactor) {
  if (!(c.r > 0)) throw domain_error("symmetric_phase_tension: requires r > 0");
  return c_prefactor * c.h / std::sqrt(c.r);
}

std::vector<ThresholdPoint> threshold_curve(const std::vector<double>& mu_tildes, double eta,
                                            double gamma_prime, double T_h,
                                            const ModelParams& params,
                                            bool h_corrected_sigma) {
  std::vector<ThresholdPoint> out;
  out.reserve(mu_tildes.size());
  for (double mt : mu_tildes) {
    ModelParams p = ModelParams::make(params.J, params.U_tilde, mt, params.q, params.n_sites,
                                      params.n_flavor, params.periodic);
    ThresholdPoint pt;
    pt.mu_tilde = mt;
    LandauCoeffs c0 = effective_coeffs(p, h_corrected_sigma ? gamma_prime : 0.0);
    pt.valid = c0.r <= 0.0;
    pt.h = gamma_to_field(p, gamma_prime);
    if (pt.valid) {
      pt.sigma = line_tension(c0);
      if (pt.sigma > 0.0) {
        ThresholdResult t = erasure_threshold(pt.h, T_h, pt.sigma, eta);
        pt.e_c = t.e_c;
        pt.clamped = t.clamped;
      } else {
        pt.e_c = 0.0;
        pt.clamped = true;
      }
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace sykm
