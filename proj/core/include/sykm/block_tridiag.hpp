#pragma once

// Selected inverse (5-block band) and log-determinant of a block-tridiagonal
// matrix with variable block sizes. One-directional Schur recursions are
// exponentially unstable for contour operators (balanced growing/decaying
// characteristics), so the elimination is segmented: interiors of short
// segments are reduced stably, the resulting small system over segment
// boundaries is solved with dense pivoted LU, and the band of the inverse is
// reassembled from the bordered-system identity.

#include <Eigen/Dense>
#include <vector>

#include "sykm/common.hpp"

namespace sykm {

struct BlockTridiag {
  std::vector<Eigen::MatrixXcd> D;  // n+1 diagonal blocks
  std::vector<Eigen::MatrixXcd> Up; // n blocks, (j, j+1)
  std::vector<Eigen::MatrixXcd> Lo; // n+1 blocks, (j, j-1); Lo[0] unused
  int n() const { return int(D.size()) - 1; }
};

struct TridiagBandInverse {
  // band[d+2][j] = A^{-1}(j, j+d) for d in [-2, 2], when 0 <= j+d <= n
  std::vector<Eigen::MatrixXcd> band[5];
  cxd logdet = 0.0;
  const Eigen::MatrixXcd& at(int j, int k) const { return band[k - j + 2][j]; }
};

// `link_growth[j]` bounds the characteristic amplification across link
// (j, j+1); segments are cut so their accumulated product stays below
// `growth_cap` (relative accuracy of the result degrades like
// eps * growth_cap).
TridiagBandInverse selected_band_inverse(const BlockTridiag& A,
                                         const std::vector<double>& link_growth,
                                         double growth_cap = 1e4);

}  // namespace sykm
