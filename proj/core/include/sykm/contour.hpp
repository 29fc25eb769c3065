#pragma once

// Discretized contour operator for one site: the four-contour, two-chain
// field space on a uniform time grid, with the temporal gluing (identity or
// twist pairing) reduced into the variable set. Link rows use the two-point
// antisymmetric form
//
//   s_alpha (psi_{j+1} - psi_j) - [S Y_l] (psi_j + psi_{j+1}) = 0,
//
// where Y_l is the Cayley transform of the exact one-step propagator
// exp(dt S sigma_mid): link transfers are then exact for piecewise-constant
// sigma (the closed-form saddle is a grid fixed point to round-off), the
// free-propagator bound |G| <= 1/2 is exact, and G = A^{-1} B is exactly
// antisymmetric for antisymmetric sigma(t). Sources carry the matching
// weight S (I - Y^2)/2 per adjacent link, and coincident-time blocks are the
// midpoint of the one-sided limits reconstructed with the link propagators.
//
// Each temporal gluing seam identifies the endpoint variables of a contour
// pair; one identification per fermion circle carries a -1 so every circle is
// antiperiodic. Grouped by time slice the operator is block tridiagonal
// (block sizes 4, 8, ..., 8, 4), so equal-time blocks of G and log det come
// from a recursive Schur (RGF) sweep in O(Nt) per evaluation.

#include <Eigen/Dense>
#include <vector>

#include "sykm/block_tridiag.hpp"
#include "sykm/model.hpp"

namespace sykm {

struct EdgePairing {
  int partner[4];
  int pair_of[4]; // 0 or 1
  int rep[2];     // smaller contour of each pair
  int other[2];
  double rho[4];  // psi^alpha(edge) = rho[alpha] * var(pair_of[alpha])
};

struct SiteGluing {
  EdgePairing bottom, top;
  static SiteGluing make(EdgeTag bottom_tag, EdgeTag top_tag);
};

class SiteContourOperator {
 public:
  SiteContourOperator(const SiteGluing& glue, int nt, double dt);

  // Equal-time physical 8x8 blocks of G at every slice; returns log det of
  // the assembled operator. `sigma` points at nt+1 blocks for this site.
  cxd equal_time_greens(const Mat8* sigma, Mat8* out) const;

  // Full two-time physical matrix, 8*(nt+1) square, row-major (alpha, a, j).
  Eigen::MatrixXcd dense_greens(const Mat8* sigma) const;

  int nt() const { return nt_; }
  const SiteGluing& gluing() const { return glue_; }

 private:
  struct VarRef {
    int col;
    double rho;
  };
  struct LinkData {
    Mat8 phi;      // exact one-step propagator
    Mat8 phi_inv;
    Mat8 coupling; // S Y
    Mat8 source;   // S (I - Y^2) / 2
  };

  int slice_size(int j) const { return (j == 0 || j == nt_) ? 4 : 8; }
  VarRef var_ref(int j, int alpha, int a) const;
  // Row of link (alpha, a, slab) inside its row group; group is slab for
  // backward contours and slab+1 for forward ones.
  int row_group(int alpha, int slab) const { return (alpha % 2 == 1) ? slab : slab + 1; }
  int local_row(int alpha, int a, int group) const;

  void link_data(const Mat8* sigma, std::vector<LinkData>& links) const;
  void assemble(const std::vector<LinkData>& links, BlockTridiag& blk) const;

  SiteGluing glue_;
  int nt_;
  double dt_;
};

}  // namespace sykm
