#include "sykm/model.hpp"

#include <cmath>

namespace sykm {

BoundarySpec BoundarySpec::twist_region(int n_sites, int start, int len) {
  BoundarySpec b = untwisted(n_sites);
  b.region_start = start;
  b.region_len = len;
  b.eta = n_sites > 0 ? double(len) / n_sites : 0.0;
  for (int k = 0; k < len; ++k) {
    int x = (start + k) % n_sites;
    if (x < 0) x += n_sites;
    b.bottom[x] = EdgeTag::Twist;
    b.top[x] = EdgeTag::Twist;
  }
  return b;
}

namespace {

bool rel_close(double a, double b, double tol) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

}  // namespace

ValidationReport validate(const ModelParams& p, const TimeGrid& grid, const ErrorProfile& err,
                          const BoundarySpec& bc) {
  ValidationReport r;

  if (!(p.J > 0)) r.fail("J must be > 0");
  if (p.U < 0) r.fail("U must be >= 0");
  if (p.mu < 0) r.fail("mu must be >= 0");
  if (p.q < 4 || p.q % 2 != 0) r.fail("q must be even >= 4");
  if (p.n_sites < 2) r.fail("L must be >= 2");
  if (p.n_flavor < 1) r.fail("N_flavor must be >= 1");
  if (!rel_close(p.U_tilde * p.J, p.U, 1e-12)) r.fail("U_tilde must equal U/J");
  if (!rel_close(p.mu_tilde * p.J, p.mu, 1e-12)) r.fail("mu_tilde must equal mu/J");

  if (!(grid.dt > 0)) r.fail("dt must be > 0");
  if (grid.nt < 8) r.fail("Nt must be >= 8");
  if (!rel_close(grid.T, grid.nt * grid.dt, 1e-12)) r.fail("T must equal Nt*dt");

  if (err.gamma_bulk < 0 || err.gamma_bulk >= 1) r.fail("gamma must be < 1 and >= 0");
  if (err.gamma_boundary < 0 || err.gamma_boundary >= 1) r.fail("gamma' must be < 1 and >= 0");
  if (err.T_h < 0) r.fail("T_h must be >= 0");
  for (int x : err.erasure_region) {
    if (x < 0 || x >= p.n_sites) {
      r.fail("erasure region must be a subset of {0..L-1}");
      break;
    }
  }

  if (int(bc.bottom.size()) != p.n_sites || int(bc.top.size()) != p.n_sites)
    r.fail("boundary tags must cover every site");
  if (bc.region_len < 0 || bc.region_len > p.n_sites) r.fail("region A must fit the chain");
  if (!p.periodic && bc.region_len > 0 &&
      bc.region_start + bc.region_len > p.n_sites)
    r.fail("region A must be an interval under the open geometry");
  if (bc.region_len > 0 && !rel_close(bc.eta, double(bc.region_len) / p.n_sites, 1e-12))
    r.fail("eta must equal |A|/L");

  return r;
}

OrderParameterField order_parameters(const EqualTimeGreens& g) {
  OrderParameterField f;
  f.n_sites = g.n_sites;
  f.nt = g.nt;
  f.phi1.assign(std::size_t(g.n_sites) * (g.nt + 1), 0.0);
  f.phi2.assign(std::size_t(g.n_sites) * (g.nt + 1), 0.0);
  const int L = kChainL;
  for (int x = 0; x < g.n_sites; ++x) {
    for (int j = 0; j <= g.nt; ++j) {
      const Mat8& b = g.at(x, j);
      // delta G relative to the symmetric solution, whose inter-contour
      // entries vanish; sign fixed so record loss favors +phi1.
      double d01 = -std::real(b(comp8(0, L), comp8(1, L)) + b(comp8(2, L), comp8(3, L)));
      double d03 = -std::real(b(comp8(0, L), comp8(3, L)) + b(comp8(1, L), comp8(2, L)));
      f.phi1[std::size_t(x) * (g.nt + 1) + j] = d01;
      f.phi2[std::size_t(x) * (g.nt + 1) + j] = d03;
    }
  }
  return f;
}

double antisymmetry_residual(const GreensTensor& g) {
  double worst = 0.0;
  for (const auto& m : g.site) {
    worst = std::max(worst, (m + m.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace sykm
