#include <cmath>

#include "sykm/saddle.hpp"

namespace sykm {

namespace {

const std::vector<SolverSeed>& seed_library() {
  static const std::vector<SolverSeed> lib = {
      SolverSeed::symmetric(),   SolverSeed::broken_plus(), SolverSeed::broken_minus(),
      SolverSeed::pattern_a(),   SolverSeed::pattern_b(),
  };
  return lib;
}

}  // namespace

EntropyResult quasi_entropy(const ModelParams& params, const TimeGrid& grid,
                            const ErrorProfile& err, const SiteInterval& region,
                            const SolverConfig& cfg,
                            const std::map<std::string, std::string>& continuation) {
  if (region.len < 0 || region.len > params.n_sites)
    throw domain_error("quasi_entropy: |A| must be within the chain");

  BoundarySpec bc_unt = BoundarySpec::untwisted(params.n_sites);
  BoundarySpec bc_tw = BoundarySpec::twist_region(params.n_sites, region.start, region.len);

  EntropyResult out;
  const bool trivial = region.len == 0; // twisted gluing equals the untwisted one

  auto run_side = [&](const char* gluing, const BoundarySpec& bc, double& min_action,
                      bool& any) {
    any = false;
    min_action = 0.0;
    for (const SolverSeed& s : seed_library()) {
      SolverConfig c = cfg;
      c.seed = s;
      std::string key = std::string(gluing) + "/" + s.name();
      if (auto it = continuation.find(key); it != continuation.end()) {
        c.seed = SolverSeed::checkpoint(it->second);
        c.seed.jitter = s.jitter;
      }
      SaddleBranch br;
      br.gluing = gluing;
      br.seed = s.name();
      try {
        auto res = std::make_shared<SaddleResult>(solve_saddle(params, grid, err, bc, c));
        br.action = res->action;
        br.action_imag = res->action_imag;
        br.iterations = res->iterations;
        br.residual = res->residual;
        br.converged = res->converged;
        br.result = std::move(res);
      } catch (const Error&) {
        if (c.seed.kind == SolverSeed::Kind::Checkpoint) {
          // cold-start fallback when a continuation checkpoint is unusable
          c.seed = s;
          auto res = std::make_shared<SaddleResult>(solve_saddle(params, grid, err, bc, c));
          br.action = res->action;
          br.action_imag = res->action_imag;
          br.iterations = res->iterations;
          br.residual = res->residual;
          br.converged = res->converged;
          br.result = std::move(res);
        } else {
          throw;
        }
      }
      if (br.converged) {
        if (!any || br.action < min_action) min_action = br.action;
        any = true;
      }
      out.branches.push_back(std::move(br));
    }
  };

  bool any_unt = false, any_tw = false;
  run_side("untwisted", bc_unt, out.min_action_untwisted, any_unt);
  if (trivial) {
    out.min_action_twisted = out.min_action_untwisted;
    any_tw = any_unt;
    for (const auto& br : std::vector<SaddleBranch>(out.branches)) {
      SaddleBranch tw = br;
      tw.gluing = "twisted";
      out.branches.push_back(std::move(tw));
    }
  } else {
    run_side("twisted", bc_tw, out.min_action_twisted, any_tw);
  }

  out.ok = any_unt && any_tw;
  if (out.ok)
    out.S2 = params.n_flavor * (out.min_action_twisted - out.min_action_untwisted);
  else
    out.S2 = std::numeric_limits<double>::quiet_NaN();
  return out;
}

FitResult fit_entropy_density(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw domain_error("fit_entropy_density: need at least 3 points");
  double n = double(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-12 * std::max(1.0, sxx * n))
    throw domain_error("fit_entropy_density: degenerate abscissae");

  FitResult f;
  f.density = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.density * sx) / n;

  double ss_res = 0, ss_tot = 0;
  double ybar = sy / n;
  for (auto& [x, y] : points) {
    double e = y - (f.density * x + f.intercept);
    ss_res += e * e;
    ss_tot += (y - ybar) * (y - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  double sxx_c = sxx - sx * sx / n;
  f.density_stderr = n > 2 ? std::sqrt(std::max(0.0, ss_res / (n - 2) / sxx_c)) : 0.0;
  return f;
}

}  // namespace sykm
