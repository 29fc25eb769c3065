#include "sykm/block_tridiag.hpp"

#include <cmath>

namespace sykm {

namespace {

using Mx = Eigen::MatrixXcd;

cxd logdet_and_invert(const Mx& m, Mx& inv) {
  Eigen::PartialPivLU<Mx> lu(m);
  cxd det = lu.determinant();
  if (!std::isfinite(std::abs(det)) || det == 0.0)
    throw Error(ErrorCode::SingularOperator, "singular pivot in block-tridiagonal elimination");
  inv = lu.inverse();
  return std::log(det);
}

struct Segment {
  int a = 0, b = 0; // breakpoint slices; interior is (a, b)
  // interior near-diagonal inverse blocks of the capped subproblem
  std::vector<Mx> zd, zp1, zm1, zp2, zm2; // indexed by slice - (a+1)
  std::vector<Mx> rfac;                   // A^{-1}[j, boundary] = rfac_j * Xc
  std::vector<Mx> cfac;                   // A^{-1}[boundary, k] = Xc * cfac_k
  Mx dd_a, dd_b;                          // Schur corrections to the coarse diagonal
  Mx up, lo;                              // coarse couplings (a,b) and (b,a)
  int len() const { return b - a - 1; }
};

}  // namespace

TridiagBandInverse selected_band_inverse(const BlockTridiag& A,
                                         const std::vector<double>& link_growth,
                                         double growth_cap) {
  const int n = A.n();

  // segment breakpoints
  std::vector<int> bp = {0};
  double acc = 1.0;
  for (int j = 0; j < n; ++j) {
    double g = std::max(1.0, j < int(link_growth.size()) ? link_growth[j] : 1.0);
    if (acc * g > growth_cap && bp.back() != j) {
      bp.push_back(j);
      acc = 1.0;
    }
    acc *= g;
  }
  if (bp.back() != n) bp.push_back(n);
  const int K = int(bp.size());

  cxd logdet = 0.0;
  std::vector<Segment> segs(K - 1);
  for (int p = 0; p + 1 < K; ++p) {
    Segment& s = segs[p];
    s.a = bp[p];
    s.b = bp[p + 1];
    const int a = s.a, b = s.b, m = s.len();
    if (m == 0) {
      s.up = A.Up[a];
      s.lo = A.Lo[b];
      s.dd_a = Mx::Zero(A.D[a].rows(), A.D[a].cols());
      s.dd_b = Mx::Zero(A.D[b].rows(), A.D[b].cols());
      continue;
    }
    // capped interior chains
    std::vector<Mx> fL(m), fR(m); // index k - (a+1)
    logdet += logdet_and_invert(A.D[a + 1], fL[0]);
    for (int k = 1; k < m; ++k) {
      Mx shat = A.D[a + 1 + k] - A.Lo[a + 1 + k] * (fL[k - 1] * A.Up[a + k]);
      logdet += logdet_and_invert(shat, fL[k]);
    }
    {
      Mx inv;
      logdet_and_invert(A.D[b - 1], inv);
      fR[m - 1] = inv;
    }
    for (int k = m - 2; k >= 0; --k) {
      Mx that = A.D[a + 1 + k] - A.Up[a + 1 + k] * (fR[k + 1] * A.Lo[a + 2 + k]);
      Mx inv;
      logdet_and_invert(that, inv);
      fR[k] = inv;
    }

    s.zd.resize(m);
    s.zp1.assign(m, Mx());
    s.zm1.assign(m, Mx());
    s.zp2.assign(m, Mx());
    s.zm2.assign(m, Mx());
    s.zd[m - 1] = fL[m - 1];
    for (int k = m - 2; k >= 0; --k) {
      s.zp1[k] = -fL[k] * A.Up[a + 1 + k] * s.zd[k + 1];
      s.zm1[k + 1] = -s.zd[k + 1] * A.Lo[a + 2 + k] * fL[k];
      s.zd[k] = fL[k] - s.zp1[k] * A.Lo[a + 2 + k] * fL[k];
    }
    for (int k = 0; k + 2 < m; ++k) s.zp2[k] = -fL[k] * A.Up[a + 1 + k] * s.zp1[k + 1];
    for (int k = 2; k < m; ++k) s.zm2[k] = -s.zm1[k] * A.Lo[a + k] * fL[k - 2];

    // first/last columns and rows of the interior inverse
    std::vector<Mx> colA(m), colB(m), rowA(m), rowB(m);
    colA[0] = s.zd[0];
    for (int k = 1; k < m; ++k) colA[k] = -fR[k] * A.Lo[a + 1 + k] * colA[k - 1];
    colB[m - 1] = s.zd[m - 1];
    for (int k = m - 2; k >= 0; --k) colB[k] = -fL[k] * A.Up[a + 1 + k] * colB[k + 1];
    rowA[0] = s.zd[0];
    for (int k = 1; k < m; ++k) rowA[k] = -rowA[k - 1] * A.Up[a + k] * fR[k];
    rowB[m - 1] = s.zd[m - 1];
    for (int k = m - 2; k >= 0; --k) rowB[k] = -rowB[k + 1] * A.Lo[a + 2 + k] * fL[k];

    s.rfac.resize(m);
    s.cfac.resize(m);
    const int na = int(A.D[a].cols()), nb = int(A.D[b].cols());
    for (int k = 0; k < m; ++k) {
      const int nk = int(A.D[a + 1 + k].rows());
      s.rfac[k] = Mx(nk, na + nb);
      s.rfac[k].leftCols(na) = -colA[k] * A.Lo[a + 1];
      s.rfac[k].rightCols(nb) = -colB[k] * A.Up[b - 1];
      s.cfac[k] = Mx(na + nb, nk);
      s.cfac[k].topRows(na) = -A.Up[a] * rowA[k];
      s.cfac[k].bottomRows(nb) = -A.Lo[b] * rowB[k];
    }

    s.dd_a = -A.Up[a] * s.zd[0] * A.Lo[a + 1];
    s.dd_b = -A.Lo[b] * s.zd[m - 1] * A.Up[b - 1];
    s.up = -A.Up[a] * colB[0] * A.Up[b - 1];
    s.lo = -A.Lo[b] * colA[m - 1] * A.Lo[a + 1];
  }

  // coarse system over the breakpoints, solved densely with pivoting
  std::vector<int> off(K + 1, 0);
  for (int p = 0; p < K; ++p) off[p + 1] = off[p] + int(A.D[bp[p]].rows());
  const int Nc = off[K];
  Mx coarse = Mx::Zero(Nc, Nc);
  for (int p = 0; p < K; ++p) {
    Mx d = A.D[bp[p]];
    if (p > 0) d += segs[p - 1].dd_b;
    if (p < K - 1) d += segs[p].dd_a;
    coarse.block(off[p], off[p], d.rows(), d.cols()) = d;
    if (p < K - 1) {
      coarse.block(off[p], off[p + 1], segs[p].up.rows(), segs[p].up.cols()) = segs[p].up;
      coarse.block(off[p + 1], off[p], segs[p].lo.rows(), segs[p].lo.cols()) = segs[p].lo;
    }
  }
  Eigen::PartialPivLU<Mx> clu(coarse);
  cxd cdet = clu.determinant();
  if (!std::isfinite(std::abs(cdet)) || cdet == 0.0)
    throw Error(ErrorCode::SingularOperator, "singular coarse system in segmented elimination");
  logdet += std::log(cdet);
  Mx Xc = clu.inverse();

  // locate each slice: breakpoint index or (segment, interior offset)
  std::vector<int> bp_index(n + 1, -1), seg_index(n + 1, -1);
  for (int p = 0; p < K; ++p) bp_index[bp[p]] = p;
  for (int p = 0; p + 1 < K; ++p)
    for (int j = bp[p] + 1; j < bp[p + 1]; ++j) seg_index[j] = p;

  auto xc_block = [&](int p, int q, int rows, int cols) {
    return Xc.block(off[p], off[q], rows, cols);
  };
  // coarse inverse restricted to the two boundaries of a segment
  auto xc_pair = [&](int pj, int pk) {
    int ra = int(A.D[bp[pj]].rows()), rb = int(A.D[bp[pj + 1]].rows());
    int ca = int(A.D[bp[pk]].cols()), cb = int(A.D[bp[pk + 1]].cols());
    Mx m(ra + rb, ca + cb);
    m.topLeftCorner(ra, ca) = xc_block(pj, pk, ra, ca);
    m.topRightCorner(ra, cb) = xc_block(pj, pk + 1, ra, cb);
    m.bottomLeftCorner(rb, ca) = xc_block(pj + 1, pk, rb, ca);
    m.bottomRightCorner(rb, cb) = xc_block(pj + 1, pk + 1, rb, cb);
    return m;
  };

  TridiagBandInverse out;
  out.logdet = logdet;
  for (int d = -2; d <= 2; ++d) out.band[d + 2].assign(n + 1, Mx());

  for (int j = 0; j <= n; ++j) {
    for (int d = -2; d <= 2; ++d) {
      int k = j + d;
      if (k < 0 || k > n) continue;
      Mx blockv;
      if (bp_index[j] >= 0 && bp_index[k] >= 0) {
        blockv = xc_block(bp_index[j], bp_index[k], A.D[j].rows(), A.D[k].cols());
      } else if (bp_index[j] >= 0) {
        const Segment& sk = segs[seg_index[k]];
        int q = bp_index[j];
        int pa = seg_index[k], ca = int(A.D[sk.a].cols()), cb = int(A.D[sk.b].cols());
        Mx xrow(A.D[j].rows(), ca + cb);
        xrow.leftCols(ca) = xc_block(q, pa, A.D[j].rows(), ca);
        xrow.rightCols(cb) = xc_block(q, pa + 1, A.D[j].rows(), cb);
        blockv = xrow * sk.cfac[k - sk.a - 1];
      } else if (bp_index[k] >= 0) {
        const Segment& sj = segs[seg_index[j]];
        int q = bp_index[k];
        int pa = seg_index[j], ra = int(A.D[sj.a].rows()), rb = int(A.D[sj.b].rows());
        Mx xcol(ra + rb, A.D[k].cols());
        xcol.topRows(ra) = xc_block(pa, q, ra, A.D[k].cols());
        xcol.bottomRows(rb) = xc_block(pa + 1, q, rb, A.D[k].cols());
        blockv = sj.rfac[j - sj.a - 1] * xcol;
      } else {
        const Segment& sj = segs[seg_index[j]];
        const Segment& sk = segs[seg_index[k]];
        blockv = sj.rfac[j - sj.a - 1] * xc_pair(seg_index[j], seg_index[k]) *
                 sk.cfac[k - sk.a - 1];
        if (seg_index[j] == seg_index[k]) {
          int kj = j - sj.a - 1, kk = k - sk.a - 1;
          const Mx* z = nullptr;
          if (d == 0)
            z = &sj.zd[kj];
          else if (d == 1)
            z = &sj.zp1[kj];
          else if (d == -1)
            z = &sj.zm1[kj];
          else if (d == 2)
            z = &sj.zp2[kj];
          else
            z = &sj.zm2[kj];
          (void)kk;
          blockv += *z;
        }
      }
      out.band[d + 2][j] = std::move(blockv);
    }
  }
  return out;
}

}  // namespace sykm
