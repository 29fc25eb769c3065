#include "sykm/wkb.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace sykm {

double WallPotential::value(double y) const {
  double s = (kind == WallSide::Plus) ? 1.0 : -1.0;
  if (y > 0.0 || y < -(T + T_h)) return std::numeric_limits<double>::infinity();
  if (y >= -T_h) return -s * h * y;
  return s * h * T_h;
}

namespace {

double plus_trapped_energy(const WallPotential& p, int n) {
  return std::cbrt(p.h * p.h / (2.0 * p.sigma)) *
         std::pow(0.75 * M_PI * (2.0 * n - 1.0), 2.0 / 3.0);
}

// Left-hand side of the Minus quantization relation at energy offset f.
double minus_phase(const WallPotential& p, double f) {
  return p.T * std::sqrt(2.0 * p.sigma * f) +
         (2.0 / 3.0) * std::sqrt(2.0 * p.sigma / (p.h * p.h)) * std::pow(f, 1.5);
}

double minus_trapped_offset(const WallPotential& p, int n) {
  double target = (n - 0.5) * M_PI;
  double lo = 0.0, hi = p.h * p.T_h;
  if (minus_phase(p, hi) < target)
    throw domain_error("wkb_trapped_energies: n beyond the trapped branch");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (minus_phase(p, mid) < target ? lo : hi) = mid;
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

int wkb_trapped_count(const WallPotential& p) {
  if (p.kind == WallSide::Plus) {
    // E_n <= h T_h with E_n ~ (2n-1)^{2/3}
    double rho = 4.0 / (3.0 * M_PI) * std::sqrt(2.0 * p.sigma) *
                 std::pow(p.h * p.T_h, 1.5) / p.h;
    return std::max(0, int(std::floor((rho + 1.0) / 2.0)));
  }
  double nmax = minus_phase(p, p.h * p.T_h) / M_PI + 0.5;
  return std::max(0, int(std::floor(nmax)));
}

std::vector<double> wkb_trapped_energies(const WallPotential& p, int n_max) {
  if (n_max < 1) throw domain_error("wkb_trapped_energies: n_max must be >= 1");
  int nstar = wkb_trapped_count(p);
  if (n_max > nstar)
    throw domain_error("wkb_trapped_energies: n beyond the trapped branch (n_* = " +
                       std::to_string(nstar) + ")");
  std::vector<double> e;
  e.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    if (p.kind == WallSide::Plus)
      e.push_back(plus_trapped_energy(p, n));
    else
      e.push_back(-p.h * p.T_h + minus_trapped_offset(p, n));
  }
  return e;
}

std::vector<double> wkb_extended_energies(const WallPotential& p, int n_max) {
  double off = (p.kind == WallSide::Plus ? 1.0 : -1.0) * p.h * p.T_h;
  std::vector<double> e;
  e.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    double k = n * M_PI / p.T;
    e.push_back(off + k * k / (2.0 * p.sigma));
  }
  return e;
}

std::vector<double> grid_diagonalize(const WallPotential& p, int grid_points,
                                     int n_eigenvalues) {
  if (grid_points < 200) throw domain_error("grid_diagonalize: need >= 200 points");
  const int m = grid_points;
  const double span = p.box_length();
  const double dy = span / (m + 1);
  std::vector<double> diag(m), off(m - 1);
  for (int i = 0; i < m; ++i) {
    double y = -span + (i + 1) * dy;
    diag[i] = 1.0 / (p.sigma * dy * dy) + p.value(y);
  }
  std::fill(off.begin(), off.end(), -0.5 / (p.sigma * dy * dy));

  lapack_int info = LAPACKE_dsterf(m, diag.data(), off.data());
  if (info != 0) throw Error(ErrorCode::Domain, "grid_diagonalize: dsterf failed");
  if (n_eigenvalues > 0 && n_eigenvalues < m) diag.resize(n_eigenvalues);
  return diag;
}

WallFreeEnergy wall_free_energy_wkb(const WallPotential& p, double x, int n_flavor,
                                    int oracle_points) {
  if (!(x > 0)) throw domain_error("wall_free_energy_wkb: x must be > 0");
  const double N = n_flavor;
  WallFreeEnergy f;
  WallPotential scaled = p;
  scaled.sigma = N * p.sigma;
  scaled.h = N * p.h;
  if (p.kind == WallSide::Plus) {
    f.leading = N * p.sigma * x;
    f.subleading = plus_trapped_energy(scaled, 1) * x; // scales as N^{1/3}
  } else {
    f.leading = N * (p.sigma - p.h * p.T_h) * x;
    f.subleading = minus_trapped_offset(scaled, 1) * x;
  }
  if (oracle_points > 0) {
    double e1 = grid_diagonalize(scaled, oracle_points, 1).front();
    f.oracle_corrected = N * p.sigma * x + e1 * x;
  } else {
    f.oracle_corrected = f.leading + f.subleading;
  }
  return f;
}

}  // namespace sykm
