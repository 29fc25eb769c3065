#include "sykm/contour.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace sykm {

namespace {

EdgePairing make_pairing(EdgeTag tag) {
  EdgePairing e;
  if (tag == EdgeTag::Identity) {
    // pairs (0,1), (2,3)
    e.partner[0] = 1; e.partner[1] = 0; e.partner[2] = 3; e.partner[3] = 2;
    e.pair_of[0] = 0; e.pair_of[1] = 0; e.pair_of[2] = 1; e.pair_of[3] = 1;
    e.rep[0] = 0; e.other[0] = 1; e.rep[1] = 2; e.other[1] = 3;
  } else {
    // twist: pairs (0,3), (1,2)
    e.partner[0] = 3; e.partner[1] = 2; e.partner[2] = 1; e.partner[3] = 0;
    e.pair_of[0] = 0; e.pair_of[1] = 1; e.pair_of[2] = 1; e.pair_of[3] = 0;
    e.rep[0] = 0; e.other[0] = 3; e.rep[1] = 1; e.other[1] = 2;
  }
  for (int a = 0; a < 4; ++a) e.rho[a] = 1.0;
  return e;
}

Mat8 contour_sign_matrix() {
  Mat8 s = Mat8::Zero();
  for (int alpha = 0; alpha < 4; ++alpha)
    for (int a = 0; a < 2; ++a)
      s(comp8(alpha, a), comp8(alpha, a)) = contour_sign(alpha);
  return s;
}

}  // namespace

SiteGluing SiteGluing::make(EdgeTag bottom_tag, EdgeTag top_tag) {
  SiteGluing g;
  g.bottom = make_pairing(bottom_tag);
  g.top = make_pairing(top_tag);

  // Walk each fermion circle (up a forward contour, across the top seam,
  // down the partner, across a bottom seam, ...) and flip the bottom
  // identification that closes it, so every circle is antiperiodic.
  bool visited[4] = {false, false, false, false};
  for (int start : {0, 2}) {
    if (visited[start]) continue;
    int cur = start;
    do {
      visited[cur] = true;
      int down = g.top.partner[cur];
      visited[down] = true;
      cur = g.bottom.partner[down];
    } while (cur != start);
    int p = g.bottom.pair_of[start];
    g.bottom.rho[g.bottom.other[p]] = -1.0;
  }
  return g;
}

SiteContourOperator::SiteContourOperator(const SiteGluing& glue, int nt, double dt)
    : glue_(glue), nt_(nt), dt_(dt) {}

SiteContourOperator::VarRef SiteContourOperator::var_ref(int j, int alpha, int a) const {
  if (j == 0) return {2 * glue_.bottom.pair_of[alpha] + a, glue_.bottom.rho[alpha]};
  if (j == nt_) return {2 * glue_.top.pair_of[alpha] + a, glue_.top.rho[alpha]};
  return {comp8(alpha, a), 1.0};
}

int SiteContourOperator::local_row(int alpha, int a, int group) const {
  if (alpha % 2 == 1) return (alpha == 1 ? 0 : 2) + a;           // backward, offset 0
  return (alpha == 0 ? 0 : 2) + a + (group == nt_ ? 0 : 4);      // forward
}

// Per-link data: Y is the Cayley transform of the exact one-step propagator
// exp(dt S sigma_mid), so link transfers are exact for piecewise-constant
// sigma. SY enters the rows, S(I - Y^2) weights the sources, and Phi
// reconstructs the one-sided coincident limits.
void SiteContourOperator::link_data(const Mat8* sigma, std::vector<LinkData>& links) const {
  static const Mat8 S = contour_sign_matrix();
  links.resize(nt_);
  for (int l = 0; l < nt_; ++l) {
    Mat8 w = S * (0.5 * (sigma[l] + sigma[l + 1]));
    Mat8 phi = (dt_ * w).exp();
    Eigen::PartialPivLU<Mat8> lu(phi + Mat8::Identity());
    Mat8 y = lu.solve(phi - Mat8::Identity());
    links[l].phi = phi;
    links[l].phi_inv = phi.partialPivLu().solve(Mat8::Identity());
    links[l].coupling = S * y;
    links[l].source = 0.5 * (Mat8::Identity() - y * y);
  }
}

void SiteContourOperator::assemble(const std::vector<LinkData>& links, BlockTridiag& blk) const {
  blk.D.resize(nt_ + 1);
  blk.Up.resize(nt_);
  blk.Lo.resize(nt_ + 1);
  for (int j = 0; j <= nt_; ++j) {
    blk.D[j] = Eigen::MatrixXcd::Zero(slice_size(j), slice_size(j));
    if (j < nt_) blk.Up[j] = Eigen::MatrixXcd::Zero(slice_size(j), slice_size(j + 1));
    if (j > 0) blk.Lo[j] = Eigen::MatrixXcd::Zero(slice_size(j), slice_size(j - 1));
  }

  for (int l = 0; l < nt_; ++l) {
    const Mat8& coup = links[l].coupling;
    for (int alpha = 0; alpha < 4; ++alpha) {
      double s = contour_sign(alpha);
      int g = row_group(alpha, l);
      for (int a = 0; a < 2; ++a) {
        int r = local_row(alpha, a, g);
        auto add = [&](int j, int beta, int b, cxd coeff) {
          VarRef v = var_ref(j, beta, b);
          cxd c = coeff * v.rho;
          if (j == g)
            blk.D[g](r, v.col) += c;
          else if (j == g + 1)
            blk.Up[g](r, v.col) += c;
          else
            blk.Lo[g](r, v.col) += c;
        };
        add(l, alpha, a, cxd(-s, 0.0));
        add(l + 1, alpha, a, cxd(s, 0.0));
        const int row8 = comp8(alpha, a);
        for (int beta = 0; beta < 4; ++beta) {
          for (int b = 0; b < 2; ++b) {
            cxd c = coup(row8, comp8(beta, b));
            if (c != 0.0) {
              add(l, beta, b, -c);
              add(l + 1, beta, b, -c);
            }
          }
        }
      }
    }
  }
}

cxd SiteContourOperator::equal_time_greens(const Mat8* sigma, Mat8* out) const {
  std::vector<LinkData> links;
  link_data(sigma, links);
  BlockTridiag blk;
  assemble(links, blk);

  const int n = nt_;
  std::vector<double> growth(n);
  for (int l = 0; l < n; ++l) {
    double g1 = links[l].phi.cwiseAbs().rowwise().sum().maxCoeff();
    double g2 = links[l].phi_inv.cwiseAbs().rowwise().sum().maxCoeff();
    double g = std::max(g1, g2);
    growth[l] = g * g; // elimination amplification outruns the physical rate
  }
  TridiagBandInverse sel = selected_band_inverse(blk, growth);
  const cxd logdet = sel.logdet;

  // A^{-1} B restricted to row slice j, source slice k (|j-k| <= 1),
  // accumulated from the links adjacent to k. Rows of slab l sit in groups l
  // (backward contours) and l+1 (forward), so offsets stay within +-2.
  auto gather = [&](int j, int k) {
    const int nj = slice_size(j);
    const int nk = slice_size(k);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(nj, nk);
    for (int slab : {k - 1, k}) {
      if (slab < 0 || slab >= n) continue;
      // fold the slab's 8x8 source block into var columns of slice k
      Eigen::MatrixXcd bcols = Eigen::MatrixXcd::Zero(8, nk);
      for (int beta = 0; beta < 4; ++beta)
        for (int b = 0; b < 2; ++b) {
          VarRef v = var_ref(k, beta, b);
          bcols.col(v.col) += v.rho * links[slab].source.col(comp8(beta, b));
        }
      for (int alpha = 0; alpha < 4; ++alpha) {
        int g = row_group(alpha, slab);
        if (std::abs(g - j) > 2) continue;
        const Eigen::MatrixXcd& X = sel.at(j, g);
        for (int a = 0; a < 2; ++a)
          m += X.col(local_row(alpha, a, g)) * bcols.row(comp8(alpha, a));
      }
    }
    return m;
  };

  // two-time physical blocks G(j, k) for |j-k| <= 1
  auto phys_block = [&](int j, int k) {
    Eigen::MatrixXcd mvar = gather(j, k);
    Mat8 block;
    for (int alpha = 0; alpha < 4; ++alpha)
      for (int a = 0; a < 2; ++a) {
        VarRef v1 = var_ref(j, alpha, a);
        for (int beta = 0; beta < 4; ++beta)
          for (int b = 0; b < 2; ++b) {
            VarRef v2 = var_ref(k, beta, b);
            block(comp8(alpha, a), comp8(beta, b)) = v1.rho * v2.rho * mvar(v1.col, v2.col);
          }
      }
    return block;
  };

  // Coincident blocks: midpoint of the one-sided limits, reconstructed with
  // the exact link propagators; B-based values at the two edge slices.
  for (int j = 0; j <= n; ++j) {
    if (j >= 1 && j <= n - 1) {
      Mat8 right = links[j].phi_inv * phys_block(j + 1, j);
      Mat8 left = links[j - 1].phi * phys_block(j - 1, j);
      Mat8 mid = 0.5 * (right + left);
      out[j] = 0.5 * (mid - mid.transpose());
    } else {
      Mat8 mid = phys_block(j, j);
      out[j] = 0.5 * (mid - mid.transpose());
    }
  }
  return logdet;
}

Eigen::MatrixXcd SiteContourOperator::dense_greens(const Mat8* sigma) const {
  std::vector<LinkData> links;
  link_data(sigma, links);
  BlockTridiag blk;
  assemble(links, blk);

  const int n = nt_;
  std::vector<int> off(n + 2, 0);
  for (int j = 0; j <= n; ++j) off[j + 1] = off[j] + slice_size(j);
  const int N = off[n + 1];

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N);
  for (int j = 0; j <= n; ++j) {
    A.block(off[j], off[j], slice_size(j), slice_size(j)) = blk.D[j];
    if (j < n) A.block(off[j], off[j + 1], slice_size(j), slice_size(j + 1)) = blk.Up[j];
    if (j > 0) A.block(off[j], off[j - 1], slice_size(j), slice_size(j - 1)) = blk.Lo[j];
  }

  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(N, N);
  for (int k = 0; k <= n; ++k) {
    for (int slab : {k - 1, k}) {
      if (slab < 0 || slab >= n) continue;
      Eigen::MatrixXcd bcols = Eigen::MatrixXcd::Zero(8, slice_size(k));
      for (int beta = 0; beta < 4; ++beta)
        for (int b = 0; b < 2; ++b) {
          VarRef v = var_ref(k, beta, b);
          bcols.col(v.col) += v.rho * links[slab].source.col(comp8(beta, b));
        }
      for (int alpha = 0; alpha < 4; ++alpha) {
        int g = row_group(alpha, slab);
        for (int a = 0; a < 2; ++a)
          B.block(off[g] + local_row(alpha, a, g), off[k], 1, slice_size(k)) +=
              bcols.row(comp8(alpha, a));
      }
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::MatrixXcd gv = lu.solve(B);
  if (!gv.allFinite())
    throw Error(ErrorCode::SingularOperator,
                "singular discretized contour operator (inconsistent gluing or dt too coarse)");

  const int P = nt_ + 1;
  Eigen::MatrixXcd gp(8 * P, 8 * P);
  for (int alpha = 0; alpha < 4; ++alpha)
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j <= n; ++j) {
        VarRef v1 = var_ref(j, alpha, a);
        int prow = comp8(alpha, a) * P + j;
        for (int beta = 0; beta < 4; ++beta)
          for (int b = 0; b < 2; ++b)
            for (int k = 0; k <= n; ++k) {
              VarRef v2 = var_ref(k, beta, b);
              gp(prow, comp8(beta, b) * P + k) =
                  v1.rho * v2.rho * gv(off[j] + v1.col, off[k] + v2.col);
            }
      }

  // replace coincident blocks by the reconstructed midpoint convention
  auto get = [&](int j, int k) {
    Mat8 m;
    for (int c1 = 0; c1 < 8; ++c1)
      for (int c2 = 0; c2 < 8; ++c2) m(c1, c2) = gp(c1 * P + j, c2 * P + k);
    return m;
  };
  for (int j = 1; j <= n - 1; ++j) {
    Mat8 mid = 0.5 * (links[j].phi_inv * get(j + 1, j) + links[j - 1].phi * get(j - 1, j));
    mid = 0.5 * (mid - mid.transpose()).eval();
    for (int c1 = 0; c1 < 8; ++c1)
      for (int c2 = 0; c2 < 8; ++c2) gp(c1 * P + j, c2 * P + j) = mid(c1, c2);
  }
  for (int j : {0, n}) {
    Mat8 mid = get(j, j);
    mid = 0.5 * (mid - mid.transpose()).eval();
    for (int c1 = 0; c1 < 8; ++c1)
      for (int c2 = 0; c2 < 8; ++c2) gp(c1 * P + j, c2 * P + j) = mid(c1, c2);
  }
  return gp;
}

}  // namespace sykm
