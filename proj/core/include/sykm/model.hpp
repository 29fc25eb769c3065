#pragma once

// Domain types shared by every other module: physical couplings, time grid,
// error profile, temporal gluing specification, and the two-time / equal-time
// Green's function containers.
//
// Index conventions, used everywhere:
//   contours  alpha in {0,1,2,3}; 0,2 run forward in time, 1,3 backward.
//             (0,1) is the first replica, (2,3) the second.
//   chains    a in {0,1} = {L,R}.
//   component c = 2*alpha + a, an 8-dimensional slice index.
//   two-time tensors are flattened row-major as (alpha, a, j) with j the
//   time-slice index, 0..Nt.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sykm/common.hpp"

namespace sykm {

using Mat8 = Eigen::Matrix<cxd, 8, 8>;

inline constexpr int kChainL = 0;
inline constexpr int kChainR = 1;

inline int comp8(int alpha, int chain) { return 2 * alpha + chain; }

// +1 on forward contours, -1 on backward ones; the (-1)^{alpha+1} of the
// contour derivative in 1-based contour labels.
inline double contour_sign(int alpha) { return (alpha % 2 == 0) ? 1.0 : -1.0; }

struct ModelParams {
  double J = 1.0;        // hopping variance rate
  double U = 0.0;        // interaction variance rate
  int q = 4;             // interaction order, even, >= 4
  double mu = 0.0;       // measurement rate
  double U_tilde = 0.0;  // U/J
  double mu_tilde = 0.0; // mu/J
  int n_sites = 2;       // L
  int n_flavor = 1;      // Majorana flavors per site per chain, overall scale
  bool periodic = true;

  static ModelParams make(double J, double U_tilde, double mu_tilde, int q = 4,
                          int n_sites = 2, int n_flavor = 1, bool periodic = true) {
    ModelParams p;
    p.J = J;
    p.U_tilde = U_tilde;
    p.mu_tilde = mu_tilde;
    p.U = U_tilde * J;
    p.mu = mu_tilde * J;
    p.q = q;
    p.n_sites = n_sites;
    p.n_flavor = n_flavor;
    p.periodic = periodic;
    return p;
  }
};

struct TimeGrid {
  double T = 1.0;   // total contour time
  double dt = 0.05; // step
  int nt = 20;      // number of steps, T = nt*dt

  static TimeGrid from_T(double T, double dt) {
    TimeGrid g;
    g.nt = static_cast<int>(std::llround(T / dt));
    g.dt = dt;
    g.T = g.nt * dt;
    return g;
  }
  int n_slices() const { return nt + 1; }
  double t(int j) const { return j * dt; }
};

struct ErrorProfile {
  double gamma_bulk = 0.0;     // record-loss rate for 0 < t < T
  double gamma_boundary = 0.0; // record-loss rate in the strip T < t < T+T_h
  double T_h = 0.0;            // strip width
  std::vector<int> erasure_region; // sites erased at the final boundary
  double erasure_fraction(int n_sites) const {
    return n_sites > 0 ? double(erasure_region.size()) / n_sites : 0.0;
  }
};

enum class EdgeTag : std::uint8_t { Identity = 0, Twist = 1 };

// Temporal gluing at the two contour edges. Identity pairs contours (0,1)
// and (2,3); Twist pairs (0,3) and (1,2), i.e. the replica swap on that site.
struct BoundarySpec {
  std::vector<EdgeTag> bottom; // tag per site at t = 0
  std::vector<EdgeTag> top;    // tag per site at t = T (or T + T_h)
  int region_start = 0;        // interval A, used when the spec models S_A
  int region_len = 0;
  double eta = 0.0;            // |A|/L when A models encoded information

  static BoundarySpec untwisted(int n_sites) {
    BoundarySpec b;
    b.bottom.assign(n_sites, EdgeTag::Identity);
    b.top.assign(n_sites, EdgeTag::Identity);
    return b;
  }
  // Twist on the interval [start, start+len) (mod L) at both edges.
  static BoundarySpec twist_region(int n_sites, int start, int len);

  bool in_region(int x) const {
    if (region_len == 0) return false;
    int r = x - region_start;
    r %= int(bottom.size());
    if (r < 0) r += int(bottom.size());
    return r < region_len;
  }
};

// Two-time Green's function, one dense complex matrix per site with the
// row-major (alpha, a, j) flattening. Heavyweight; the solver keeps only
// equal-time blocks and materializes this on demand.
struct GreensTensor {
  int n_sites = 0;
  int nt = 0;
  std::vector<Eigen::MatrixXcd> site;

  static GreensTensor zeros(int n_sites, int nt) {
    GreensTensor g;
    g.n_sites = n_sites;
    g.nt = nt;
    g.site.assign(n_sites, Eigen::MatrixXcd::Zero(8 * (nt + 1), 8 * (nt + 1)));
    return g;
  }
  int idx(int alpha, int chain, int j) const { return (2 * alpha + chain) * (nt + 1) + j; }
  cxd g(int x, int alpha, int a, int j, int beta, int b, int k) const {
    return site[x](idx(alpha, a, j), idx(beta, b, k));
  }
  cxd& g(int x, int alpha, int a, int j, int beta, int b, int k) {
    return site[x](idx(alpha, a, j), idx(beta, b, k));
  }
  // M^{alpha,beta} = G_LL + G_RR - i G_LR + i G_RL
  cxd M(int x, int alpha, int beta, int j, int k) const {
    return g(x, alpha, kChainL, j, beta, kChainL, k) + g(x, alpha, kChainR, j, beta, kChainR, k) -
           I_UNIT * g(x, alpha, kChainL, j, beta, kChainR, k) +
           I_UNIT * g(x, alpha, kChainR, j, beta, kChainL, k);
  }
};

// Equal-time slices of G: one 8x8 block per (site, time slice). This is the
// complete state of the fixed-point iteration (the self-energy is built from
// equal-time values only).
struct EqualTimeGreens {
  int n_sites = 0;
  int nt = 0;
  std::vector<Mat8> blk; // x*(nt+1) + j

  static EqualTimeGreens zeros(int n_sites, int nt) {
    EqualTimeGreens g;
    g.n_sites = n_sites;
    g.nt = nt;
    g.blk.assign(std::size_t(n_sites) * (nt + 1), Mat8::Zero());
    return g;
  }
  Mat8& at(int x, int j) { return blk[std::size_t(x) * (nt + 1) + j]; }
  const Mat8& at(int x, int j) const { return blk[std::size_t(x) * (nt + 1) + j]; }
};

// Time-local self-energy, Sigma(t,t') = delta(t-t') sigma(t); same block
// layout as EqualTimeGreens.
struct SelfEnergy {
  int n_sites = 0;
  int nt = 0;
  std::vector<Mat8> blk;

  static SelfEnergy zeros(int n_sites, int nt) {
    SelfEnergy s;
    s.n_sites = n_sites;
    s.nt = nt;
    s.blk.assign(std::size_t(n_sites) * (nt + 1), Mat8::Zero());
    return s;
  }
  Mat8& at(int x, int j) { return blk[std::size_t(x) * (nt + 1) + j]; }
  const Mat8& at(int x, int j) const { return blk[std::size_t(x) * (nt + 1) + j]; }
};

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> violations;
  void fail(const std::string& msg) {
    pass = false;
    violations.push_back(msg);
  }
};

ValidationReport validate(const ModelParams& params, const TimeGrid& grid,
                          const ErrorProfile& err, const BoundarySpec& bc);

// Two-component order-parameter field phi(x, t_j) = (phi1, phi2), measured
// relative to the symmetric (zeta = 0) solution and sign-fixed so that the
// record-loss-favored direction is +phi1. phi1 tracks the inter-contour
// (0,1)+(2,3) components, phi2 the (0,3)+(1,2) ones, both read from LL.
struct OrderParameterField {
  int n_sites = 0;
  int nt = 0;
  std::vector<double> phi1; // x*(nt+1)+j
  std::vector<double> phi2;
};

OrderParameterField order_parameters(const EqualTimeGreens& g);

// Largest |G(t,t') + G^T(t',t)| over a site's two-time tensor.
double antisymmetry_residual(const GreensTensor& g);

}  // namespace sykm
