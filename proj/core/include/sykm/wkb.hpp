#pragma once

// WKB quantization of a particle of mass 1/(2 sigma) in the piecewise-linear
// wall potentials, with an exact grid-diagonalization oracle.

#include <vector>

#include "sykm/common.hpp"

namespace sykm {

enum class WallSide { Plus, Minus };

// V_plus: hard wall at y = 0, slope -h y on (-T_h, 0), plateau h T_h on
// (-T_h - T, -T_h), hard wall below. V_minus mirrors the sign of the field.
struct WallPotential {
  WallSide kind = WallSide::Plus;
  double sigma = 1.0; // tension; the particle mass is 1/(2 sigma)
  double h = 1.0;     // field slope
  double T_h = 1.0;   // strip width
  double T = 1.0;     // bulk depth

  double value(double y) const;
  double box_length() const { return T + T_h; }
};

// Trapped-branch energies; for Plus the closed form
// E_n = (h^2/2sigma)^{1/3} (3 pi (2n-1)/4)^{2/3} up to E <= h T_h, for Minus
// the implicit relation solved per n by bracketed bisection. Throws when
// n_max exceeds the trapped count n_*.
std::vector<double> wkb_trapped_energies(const WallPotential& p, int n_max);

// Largest n with a trapped state.
int wkb_trapped_count(const WallPotential& p);

// Extended-branch energies E_n = +-h T_h + (n pi / T)^2 / (2 sigma).
std::vector<double> wkb_extended_energies(const WallPotential& p, int n_max);

// Sorted eigenvalues of the discretized H = p_y^2/(2 sigma) + V(y) with
// Dirichlet walls; grid_points >= 200.
std::vector<double> grid_diagonalize(const WallPotential& p, int grid_points,
                                     int n_eigenvalues = 0);

struct WallFreeEnergy {
  double leading = 0.0;    // N sigma x (Plus) or N (sigma - h T_h) x (Minus)
  double subleading = 0.0; // N^{1/3} trapped-ground-state correction (Plus)
  double oracle_corrected = 0.0; // leading + grid-oracle ground-state term
};

WallFreeEnergy wall_free_energy_wkb(const WallPotential& p, double x, int n_flavor,
                                    int oracle_points = 0);

}  // namespace sykm
