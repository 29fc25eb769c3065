#include "sykm/saddle.hpp"

#include <cmath>
#include <random>

#include "sykm/checkpoint.hpp"

namespace sykm {

double mu_of_zeta(double zeta, double gamma, double U_tilde) {
  double z2 = zeta * zeta;
  if (gamma == 0.0) return (1.0 + U_tilde * z2) * std::sqrt(std::max(0.0, 1.0 - z2));
  double num = zeta * (1.0 + U_tilde * z2) *
               (gamma * (1.0 - z2) + zeta * std::sqrt((1.0 - z2) * (1.0 - gamma * gamma)));
  return num / (z2 - gamma * gamma);
}

double zeta_of_mu(double mu_tilde, double gamma, double U_tilde) {
  if (mu_tilde < 0 || gamma < 0 || gamma >= 1 || U_tilde < 0)
    throw domain_error("zeta_of_mu: inputs out of range");
  if (gamma == 0.0 || mu_tilde == 0.0) {
    if (mu_tilde >= 1.0) return 0.0;
    if (mu_tilde == 0.0) return 1.0;
    double lo = 0.0, hi = 1.0; // f(lo) = 1 - mu > 0, f(hi) = -mu < 0
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      double f = mu_of_zeta(mid, 0.0, U_tilde) - mu_tilde;
      (f > 0 ? lo : hi) = mid;
      if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
  }
  double lo = gamma * (1.0 + 1e-14) + 1e-300;
  double hi = 1.0 - 1e-14;
  double flo = mu_of_zeta(lo, gamma, U_tilde) - mu_tilde;
  double fhi = mu_of_zeta(hi, gamma, U_tilde) - mu_tilde;
  if (!(flo > 0) || !(fhi < 0))
    throw domain_error("zeta_of_mu: no root bracketed in (gamma, 1)");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = mu_of_zeta(mid, gamma, U_tilde) - mu_tilde;
    (f > 0 ? lo : hi) = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

int strip_steps(const TimeGrid& grid, const ErrorProfile& err) {
  if (err.T_h <= 0) return 0;
  return static_cast<int>(std::ceil(err.T_h / grid.dt - 1e-9));
}

double gamma_at_slice(const ErrorProfile& err, const TimeGrid& grid, int j) {
  double t = j * grid.dt;
  if (t < grid.T - 1e-12 * std::max(1.0, grid.T) || err.T_h <= 0) return err.gamma_bulk;
  return err.gamma_boundary;
}

namespace {

double saddle_decay_rate(const ModelParams& p, double zeta, double gamma) {
  if (zeta > 0.0) {
    double rate = p.J + p.U * zeta * zeta;
    if (gamma > 0.0 && p.mu > 0.0) rate += gamma * p.mu / zeta;
    return rate;
  }
  return p.mu > 0.0 ? p.mu : p.J;
}

cxd ipow(cxd base, int n) {
  cxd r = 1.0;
  for (int k = 0; k < n; ++k) r *= base;
  return r;
}

}  // namespace

GreensTensor symmetric_saddle(const ModelParams& params, double zeta, const TimeGrid& grid) {
  if (zeta < 0.0 || zeta >= 1.0) throw domain_error("symmetric_saddle: zeta outside [0,1)");
  // gamma enters the closed form only through the decay rate and the
  // inter-contour LR components; the bulk profile value applies.
  double gamma = 0.0; // the zeta = 0 form drops the gamma terms (S8 limit)
  double rate = saddle_decay_rate(params, zeta, gamma);
  double w = params.mu > 0.0 ? params.mu / rate : 0.0;

  GreensTensor g = GreensTensor::zeros(1, grid.nt);
  // pair blocks (0,1) and (2,3); cross blocks vanish
  for (int j = 0; j <= grid.nt; ++j) {
    for (int k = 0; k <= grid.nt; ++k) {
      double tau = grid.t(j) - grid.t(k);
      double e = 0.5 * std::exp(-0.5 * rate * std::abs(tau));
      double sg = (tau > 0) - (tau < 0);
      for (int pair = 0; pair < 2; ++pair) {
        int a0 = 2 * pair, a1 = 2 * pair + 1;
        for (int chain = 0; chain < 2; ++chain) {
          g.g(0, a0, chain, j, a0, chain, k) = e * sg;
          g.g(0, a1, chain, j, a1, chain, k) = -e * sg;
          g.g(0, a0, chain, j, a1, chain, k) = -zeta * e;
          g.g(0, a1, chain, j, a0, chain, k) = zeta * e;
        }
        for (int p = 0; p < 2; ++p) {
          g.g(0, a0 + p, kChainL, j, a0 + p, kChainR, k) = I_UNIT * w * e;
          g.g(0, a0 + p, kChainR, j, a0 + p, kChainL, k) = -I_UNIT * w * e;
        }
        if (gamma > 0.0) {
          g.g(0, a0, kChainL, j, a1, kChainR, k) = I_UNIT * w * gamma * e;
          g.g(0, a1, kChainL, j, a0, kChainR, k) = I_UNIT * w * gamma * e;
          g.g(0, a0, kChainR, j, a1, kChainL, k) = -I_UNIT * w * gamma * e;
          g.g(0, a1, kChainR, j, a0, kChainL, k) = -I_UNIT * w * gamma * e;
        }
      }
    }
  }
  return g;
}

Mat8 symmetric_equal_time_block(const ModelParams& params, double zeta, double gamma, int branch) {
  double rate = saddle_decay_rate(params, zeta, gamma);
  double w = params.mu > 0.0 ? params.mu / rate : 0.0;
  double z = branch >= 0 ? zeta : -zeta;

  Mat8 b = Mat8::Zero();
  for (int pair = 0; pair < 2; ++pair) {
    int a0 = 2 * pair, a1 = 2 * pair + 1;
    for (int chain = 0; chain < 2; ++chain) {
      b(comp8(a0, chain), comp8(a1, chain)) = -0.5 * z;
      b(comp8(a1, chain), comp8(a0, chain)) = 0.5 * z;
    }
    for (int p = 0; p < 2; ++p) {
      b(comp8(a0 + p, kChainL), comp8(a0 + p, kChainR)) = 0.5 * I_UNIT * w;
      b(comp8(a0 + p, kChainR), comp8(a0 + p, kChainL)) = -0.5 * I_UNIT * w;
    }
    if (gamma > 0.0 && zeta > 0.0) {
      b(comp8(a0, kChainL), comp8(a1, kChainR)) = 0.5 * I_UNIT * w * gamma;
      b(comp8(a1, kChainL), comp8(a0, kChainR)) = 0.5 * I_UNIT * w * gamma;
      b(comp8(a0, kChainR), comp8(a1, kChainL)) = -0.5 * I_UNIT * w * gamma;
      b(comp8(a1, kChainR), comp8(a0, kChainL)) = -0.5 * I_UNIT * w * gamma;
    }
  }
  return b;
}

Mat8 c4_rotate_block(const Mat8& block) {
  static const int map[4] = {2, 1, 0, 3};
  static const double sgn[4] = {1.0, 1.0, -1.0, 1.0};
  Mat8 out;
  for (int alpha = 0; alpha < 4; ++alpha)
    for (int a = 0; a < 2; ++a)
      for (int beta = 0; beta < 4; ++beta)
        for (int b = 0; b < 2; ++b)
          out(comp8(alpha, a), comp8(beta, b)) =
              sgn[alpha] * sgn[beta] * block(comp8(map[alpha], a), comp8(map[beta], b));
  return out;
}

namespace {

void self_energy_update_into(const EqualTimeGreens& g, const ModelParams& p,
                             const ErrorProfile& err, const TimeGrid& grid, SelfEnergy& out) {
  const int L = p.n_sites;
  const int nt = g.nt;
  const double mu = p.mu;
  for (int x = 0; x < L; ++x) {
    int xm = (x - 1 + L) % L;
    int xp = (x + 1) % L;
    bool has_m = p.periodic || x > 0;
    bool has_p = p.periodic || x < L - 1;
    for (int j = 0; j <= nt; ++j) {
      Mat8& s = out.at(x, j);
      s.setZero();
      double gam = gamma_at_slice(err, grid, j);
      // measurement: -i mu/2 on contour-diagonal LR, antisymmetric partner +i mu/2
      for (int alpha = 0; alpha < 4; ++alpha) {
        s(comp8(alpha, kChainL), comp8(alpha, kChainR)) += -0.5 * I_UNIT * mu;
        s(comp8(alpha, kChainR), comp8(alpha, kChainL)) += 0.5 * I_UNIT * mu;
      }
      // record loss on the (0,1) and (2,3) blocks
      if (gam > 0.0 && mu > 0.0) {
        double gm = 0.5 * gam * mu;
        for (int pair = 0; pair < 2; ++pair) {
          int u = 2 * pair, v = 2 * pair + 1;
          for (int chain = 0; chain < 2; ++chain) {
            s(comp8(u, chain), comp8(v, chain)) += -gm;
            s(comp8(v, chain), comp8(u, chain)) += gm;
          }
          s(comp8(u, kChainL), comp8(v, kChainR)) += I_UNIT * gm;
          s(comp8(u, kChainR), comp8(v, kChainL)) += -I_UNIT * gm;
          s(comp8(v, kChainL), comp8(u, kChainR)) += I_UNIT * gm;
          s(comp8(v, kChainR), comp8(u, kChainL)) += -I_UNIT * gm;
        }
      }
      // hopping and interaction, chain-diagonal
      const Mat8& gx = g.at(x, j);
      for (int alpha = 0; alpha < 4; ++alpha)
        for (int beta = 0; beta < 4; ++beta) {
          double coef = ((alpha + beta) % 2 == 0) ? -1.0 : 1.0;
          for (int a = 0; a < 2; ++a) {
            int r = comp8(alpha, a), c = comp8(beta, a);
            cxd hop = 0.0;
            if (has_m) hop += g.at(xm, j)(r, c);
            if (has_p) hop += g.at(xp, j)(r, c);
            cxd val = p.J * hop + p.U * ipow(2.0 * gx(r, c), p.q - 1);
            s(r, c) += 0.5 * coef * val;
          }
        }
    }
  }
}

EqualTimeGreens equal_time_from_dense(const GreensTensor& g) {
  EqualTimeGreens out = EqualTimeGreens::zeros(g.n_sites, g.nt);
  for (int x = 0; x < g.n_sites; ++x)
    for (int j = 0; j <= g.nt; ++j) {
      Mat8& b = out.at(x, j);
      for (int alpha = 0; alpha < 4; ++alpha)
        for (int a = 0; a < 2; ++a)
          for (int beta = 0; beta < 4; ++beta)
            for (int b2 = 0; b2 < 2; ++b2)
              b(comp8(alpha, a), comp8(beta, b2)) = g.g(x, alpha, a, j, beta, b2, j);
    }
  return out;
}

}  // namespace

SelfEnergy self_energy_update(const EqualTimeGreens& g, const ModelParams& params,
                              const ErrorProfile& err, const TimeGrid& grid) {
  SelfEnergy s = SelfEnergy::zeros(g.n_sites, g.nt);
  self_energy_update_into(g, params, err, grid, s);
  return s;
}

SelfEnergy self_energy_update(const GreensTensor& g, const ModelParams& params,
                              const ErrorProfile& err, const TimeGrid& grid) {
  EqualTimeGreens eq = equal_time_from_dense(g);
  return self_energy_update(eq, params, err, grid);
}

GreensTensor dyson_inverse(const SelfEnergy& sigma, const BoundarySpec& bc,
                           const TimeGrid& grid) {
  (void)grid;
  GreensTensor g;
  g.n_sites = sigma.n_sites;
  g.nt = sigma.nt;
  g.site.resize(sigma.n_sites);
  for (int x = 0; x < sigma.n_sites; ++x) {
    SiteContourOperator op(SiteGluing::make(bc.bottom[x], bc.top[x]), sigma.nt, grid.dt);
    g.site[x] = op.dense_greens(&sigma.blk[std::size_t(x) * (sigma.nt + 1)]);
  }
  return g;
}

std::string SolverSeed::name() const {
  switch (kind) {
    case Kind::Symmetric: return "symmetric";
    case Kind::BrokenPlus: return "broken_plus";
    case Kind::BrokenMinus: return "broken_minus";
    case Kind::DomainPatternA: return "pattern_a";
    case Kind::DomainPatternB: return "pattern_b";
    case Kind::Checkpoint: return "checkpoint";
  }
  return "?";
}

EqualTimeGreens seed_state(const ModelParams& params, const TimeGrid& grid,
                           const ErrorProfile& err, const BoundarySpec& bc,
                           const SolverSeed& seed) {
  const int extra = strip_steps(grid, err);
  const int nt_total = grid.nt + extra;
  const int L = params.n_sites;

  if (seed.kind == SolverSeed::Kind::Checkpoint) {
    Checkpoint ck = read_checkpoint(seed.checkpoint_path);
    if (ck.g.n_sites != L || ck.g.nt != nt_total)
      throw Error(ErrorCode::Config, "checkpoint shape does not match the requested grid");
    return ck.g;
  }

  EqualTimeGreens g = EqualTimeGreens::zeros(L, nt_total);
  double gamma = err.gamma_bulk > 0 ? err.gamma_bulk : err.gamma_boundary;
  double zeta_star = zeta_of_mu(params.mu_tilde, err.gamma_bulk, params.U_tilde);
  double amp = std::max(zeta_star, 0.25); // seed amplitude even in the symmetric phase

  Mat8 sym = symmetric_equal_time_block(params, 0.0, 0.0, +1);
  Mat8 plus = symmetric_equal_time_block(params, amp, gamma, +1);
  Mat8 minus = symmetric_equal_time_block(params, amp, gamma, -1);
  Mat8 rot = c4_rotate_block(plus);

  const double T_total = nt_total * grid.dt;
  double w = std::max(err.T_h, 2.0 / params.J);
  w = std::min(w, T_total / 3.0);
  w = std::max(w, grid.dt);

  std::mt19937_64 rng(seed.jitter_seed + 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  for (int x = 0; x < L; ++x) {
    bool in_a = bc.in_region(x);
    for (int j = 0; j <= nt_total; ++j) {
      double t = j * grid.dt;
      bool near_edge = (t <= w) || (t >= T_total - w);
      Mat8 blk;
      switch (seed.kind) {
        case SolverSeed::Kind::Symmetric: blk = sym; break;
        case SolverSeed::Kind::BrokenPlus: blk = plus; break;
        case SolverSeed::Kind::BrokenMinus: blk = minus; break;
        case SolverSeed::Kind::DomainPatternA:
          blk = (in_a && near_edge) ? rot : plus;
          break;
        case SolverSeed::Kind::DomainPatternB:
          blk = (!in_a && near_edge) ? plus : rot;
          break;
        case SolverSeed::Kind::Checkpoint: blk = sym; break; // unreachable
      }
      if (seed.jitter > 0.0) blk *= (1.0 + seed.jitter * uni(rng));
      g.at(x, j) = blk;
    }
  }
  return g;
}

namespace {

struct SweepWorkspace {
  std::vector<SiteContourOperator> ops;
  SelfEnergy sigma;
  EqualTimeGreens gnew;
};

// One fixed-point sweep: sigma(g) then per-site Dyson inversion.
cxd sweep(const EqualTimeGreens& g, const ModelParams& params, const ErrorProfile& err,
          const TimeGrid& grid, SweepWorkspace& ws) {
  self_energy_update_into(g, params, err, grid, ws.sigma);
  cxd logdet = 0.0;
  const int stride = g.nt + 1;
  for (int x = 0; x < g.n_sites; ++x)
    logdet += ws.ops[x].equal_time_greens(&ws.sigma.blk[std::size_t(x) * stride],
                                          &ws.gnew.blk[std::size_t(x) * stride]);
  return logdet;
}

double max_diff(const EqualTimeGreens& a, const EqualTimeGreens& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.blk.size(); ++i)
    m = std::max(m, (a.blk[i] - b.blk[i]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

SaddleResult solve_saddle(const ModelParams& params, const TimeGrid& grid,
                          const ErrorProfile& err, const BoundarySpec& bc,
                          const SolverConfig& cfg) {
  if (!(cfg.mixing > 0 && cfg.mixing <= 1) || !(cfg.tol > 0) || cfg.max_iter < 1)
    throw config_error("solver config out of range");
  ValidationReport rep = validate(params, grid, err, bc);
  if (!rep.pass) throw domain_error("invalid solver inputs: " + rep.violations.front());

  const int nt_total = grid.nt + strip_steps(grid, err);
  EqualTimeGreens g = seed_state(params, grid, err, bc, cfg.seed);

  SweepWorkspace ws;
  ws.ops.reserve(params.n_sites);
  for (int x = 0; x < params.n_sites; ++x)
    ws.ops.emplace_back(SiteGluing::make(bc.bottom[x], bc.top[x]), nt_total, grid.dt);
  ws.sigma = SelfEnergy::zeros(params.n_sites, nt_total);
  ws.gnew = EqualTimeGreens::zeros(params.n_sites, nt_total);

  SaddleResult res;
  res.iterations = 0;
  res.residual = std::numeric_limits<double>::infinity();
  cxd logdet = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    logdet = sweep(g, params, err, grid, ws);
    double r = max_diff(ws.gnew, g);
    res.iterations = it;
    res.residual = r;
    if (!std::isfinite(r)) break;
    if (r < cfg.tol) {
      res.converged = true;
      break;
    }
    for (std::size_t i = 0; i < g.blk.size(); ++i)
      g.blk[i] = (1.0 - cfg.mixing) * g.blk[i] + cfg.mixing * ws.gnew.blk[i];
  }

  // Return the Dyson output of the last sigma: the pair (G, Sigma) then
  // satisfies the first saddle equation exactly.
  res.g = ws.gnew;
  res.sigma = ws.sigma;
  res.logdet_sum = logdet;

  if (res.converged && cfg.check_final) {
    SweepWorkspace ws2;
    ws2.ops = std::move(ws.ops);
    ws2.sigma = SelfEnergy::zeros(params.n_sites, nt_total);
    ws2.gnew = EqualTimeGreens::zeros(params.n_sites, nt_total);
    sweep(res.g, params, err, grid, ws2);
    res.sd_residual = max_diff(ws2.gnew, res.g);
  }

  cxd act = on_shell_action_cx(res, params, err, grid);
  res.action = act.real();
  res.action_imag = act.imag();
  return res;
}

cxd on_shell_action_cx(const SaddleResult& res, const ModelParams& params,
                       const ErrorProfile& err, const TimeGrid& grid) {
  const int nt = res.g.nt;
  const int L = res.g.n_sites;
  const double dt = grid.dt;
  const double mu = params.mu;

  cxd sigma_g = 0.0;
  cxd local = 0.0;
  for (int x = 0; x < L; ++x) {
    int xp = (x + 1) % L;
    bool has_p = params.periodic || x < L - 1;
    for (int j = 0; j <= nt; ++j) {
      double wj = dt * ((j == 0 || j == nt) ? 0.5 : 1.0);
      const Mat8& gx = res.g.at(x, j);
      const Mat8& sx = res.sigma.at(x, j);
      sigma_g += wj * (sx.cwiseProduct(gx)).sum();

      cxd loc = 0.0;
      for (int alpha = 0; alpha < 4; ++alpha)
        for (int beta = 0; beta < 4; ++beta) {
          double coef = ((alpha + beta) % 2 == 0) ? -1.0 : 1.0;
          for (int a = 0; a < 2; ++a) {
            int r = comp8(alpha, a), c = comp8(beta, a);
            if (has_p) loc += 0.25 * coef * params.J * gx(r, c) * res.g.at(xp, j)(r, c);
            loc += 0.25 * coef * (params.U / (2.0 * params.q)) * ipow(2.0 * gx(r, c), params.q);
          }
        }
      for (int alpha = 0; alpha < 4; ++alpha)
        loc += -0.5 * mu * I_UNIT * gx(comp8(alpha, kChainL), comp8(alpha, kChainR));
      double gam = gamma_at_slice(err, grid, j);
      if (gam > 0.0 && mu > 0.0) {
        for (int pair = 0; pair < 2; ++pair) {
          int u = 2 * pair, v = 2 * pair + 1;
          cxd M = gx(comp8(u, kChainL), comp8(v, kChainL)) +
                  gx(comp8(u, kChainR), comp8(v, kChainR)) -
                  I_UNIT * gx(comp8(u, kChainL), comp8(v, kChainR)) +
                  I_UNIT * gx(comp8(u, kChainR), comp8(v, kChainL));
          loc += -0.5 * gam * mu * M;
        }
      }
      local += wj * loc;
    }
  }

  cxd minus_action = 0.5 * res.logdet_sum - 0.5 * sigma_g + local;
  return -minus_action;
}

double on_shell_action(const SaddleResult& res, const ModelParams& params,
                       const ErrorProfile& err, const TimeGrid& grid) {
  if (!res.converged) throw domain_error("on_shell_action: result did not converge");
  return on_shell_action_cx(res, params, err, grid).real();
}

}  // namespace sykm
