#include "sykm/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sykm/checkpoint.hpp"
#include "sykm/framepot.hpp"
#include "sykm/landau.hpp"
#include "sykm/wkb.hpp"

namespace sykm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::pair<int, std::vector<std::string>>> rows; // (sort key, cells)
  std::mutex mu;

  void add(int idx, std::vector<std::string> cells) {
    std::lock_guard<std::mutex> lock(mu);
    rows.emplace_back(idx, std::move(cells));
  }
  void write(const std::string& path) {
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw io_error("cannot open output: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i)
      f << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    for (auto& [idx, cells] : rows)
      for (std::size_t i = 0; i < cells.size(); ++i)
        f << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    if (!f) throw io_error("short write on output: " + path);
  }
};

bool all_finite(const std::vector<double>& vals) {
  for (double v : vals)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string out_path(const RunConfig& cfg, const RunOptions& opt, const char* fallback) {
  if (!opt.out_override.empty()) return opt.out_override;
  if (!cfg.out_csv.empty()) return cfg.out_csv;
  return fallback;
}

// ---------------------------------------------------------------- sweeps --

struct SweepPoint {
  int idx = 0;
  ModelParams params;
  ErrorProfile err;
  std::vector<std::pair<std::string, double>> axis_values;
};

void apply_axis(const std::string& param, double v, ModelParams& p, ErrorProfile& e) {
  if (param == "mu_tilde")
    p = ModelParams::make(p.J, p.U_tilde, v, p.q, p.n_sites, p.n_flavor, p.periodic);
  else if (param == "U_tilde")
    p = ModelParams::make(p.J, v, p.mu_tilde, p.q, p.n_sites, p.n_flavor, p.periodic);
  else if (param == "L")
    p = ModelParams::make(p.J, p.U_tilde, p.mu_tilde, p.q, int(std::lround(v)), p.n_flavor,
                          p.periodic);
  else if (param == "gamma_bulk")
    e.gamma_bulk = v;
  else if (param == "gamma_boundary")
    e.gamma_boundary = v;
  else if (param == "T_h")
    e.T_h = v;
  else if (param == "T" || param == "t") {
    // handled by the command (grid time / frame-potential time)
  } else {
    throw config_error("unsupported sweep parameter: " + param);
  }
}

std::vector<SweepPoint> expand_sweep(const RunConfig& cfg) {
  std::vector<std::vector<double>> axes;
  for (const auto& a : cfg.sweeps) axes.push_back(a.values());
  std::vector<SweepPoint> pts;
  std::vector<std::size_t> cursor(axes.size(), 0);
  int idx = 0;
  while (true) {
    SweepPoint pt;
    pt.idx = idx++;
    pt.params = cfg.model;
    pt.err = cfg.error;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      double v = axes[i][cursor[i]];
      pt.axis_values.emplace_back(cfg.sweeps[i].param, v);
      apply_axis(cfg.sweeps[i].param, v, pt.params, pt.err);
    }
    pts.push_back(std::move(pt));
    // odometer increment, last axis fastest
    int k = int(axes.size()) - 1;
    for (; k >= 0; --k) {
      if (++cursor[k] < axes[k].size()) break;
      cursor[k] = 0;
    }
    if (k < 0 || axes.empty()) break;
  }
  return pts;
}

double axis_value_or(const SweepPoint& pt, const std::string& name, double fallback) {
  for (auto& [k, v] : pt.axis_values)
    if (k == name) return v;
  return fallback;
}

// --------------------------------------------------------------- entropy --

const char* kGluings[2] = {"untwisted", "twisted"};
const char* kSeeds[5] = {"symmetric", "broken_plus", "broken_minus", "pattern_a", "pattern_b"};

std::vector<std::string> entropy_columns() {
  std::vector<std::string> cols = {
      "idx",        "L",          "T",          "dt",           "nt",
      "mu_tilde",   "U_tilde",    "gamma_bulk", "gamma_boundary", "T_h",
      "region_start", "region_len", "N_flavor", "zeta_root",    "S2",
      "min_action_untwisted", "min_action_twisted", "all_converged",
      "iterations_max", "residual_max", "action_imag_max"};
  for (const char* g : kGluings)
    for (const char* s : kSeeds) {
      cols.push_back(std::string(g) + "_" + s + "_action");
      cols.push_back(std::string(g) + "_" + s + "_converged");
      cols.push_back(std::string(g) + "_" + s + "_iterations");
    }
  for (const char* s : kSeeds) cols.push_back(std::string("S2_branch_") + s);
  // wall-clock stays in the row cache: the CSV must be byte-reproducible
  return cols;
}

struct EntropyPointOutcome {
  bool have_row = false;
  bool solver_failed = false;
  std::vector<std::string> cells;
  double wall_seconds = 0.0;
};

EntropyPointOutcome entropy_point_row(const RunConfig& cfg, const SweepPoint& pt,
                                      const std::map<std::string, std::string>& continuation,
                                      std::map<std::string, std::string>* branch_paths,
                                      const std::string& ck_prefix) {
  EntropyPointOutcome out;
  auto t0 = std::chrono::steady_clock::now();

  ModelParams params = pt.params;
  TimeGrid grid = cfg.TJ_equals_L
                      ? TimeGrid::from_T(double(params.n_sites) / params.J, cfg.dt)
                      : TimeGrid::from_T(axis_value_or(pt, "T", cfg.T), cfg.dt);
  SiteInterval region{cfg.region.start, cfg.region.resolve(params.n_sites)};

  SolverConfig sc = cfg.solver;
  sc.seed.jitter = cfg.seed_jitter;
  sc.seed.jitter_seed = cfg.rng_seed + std::uint64_t(pt.idx) * 0x100000001b3ull;

  EntropyResult er = quasi_entropy(params, grid, pt.err, region, sc, continuation);

  double zeta = zeta_of_mu(params.mu_tilde, pt.err.gamma_bulk, params.U_tilde);
  int iter_max = 0;
  double res_max = 0, imag_max = 0;
  for (const auto& br : er.branches) {
    iter_max = std::max(iter_max, br.iterations);
    res_max = std::max(res_max, br.residual);
    imag_max = std::max(imag_max, std::abs(br.action_imag));
  }
  std::vector<double> nums = {double(params.n_sites), grid.T, grid.dt, double(grid.nt),
                              params.mu_tilde, params.U_tilde, pt.err.gamma_bulk,
                              pt.err.gamma_boundary, pt.err.T_h, double(region.start),
                              double(region.len), double(params.n_flavor), zeta, er.S2,
                              er.min_action_untwisted, er.min_action_twisted};
  if (!er.ok || !all_finite(nums)) {
    out.solver_failed = true;
    std::cerr << "sykm: point " << pt.idx
              << ": no converged saddle on some gluing or non-finite observable; row rejected\n";
    return out;
  }

  std::vector<std::string> cells;
  cells.push_back(std::to_string(pt.idx));
  for (double v : nums) cells.push_back(format_g17(v));
  cells.push_back(er.ok ? "1" : "0");
  cells.push_back(std::to_string(iter_max));
  cells.push_back(format_g17(res_max));
  cells.push_back(format_g17(imag_max));

  auto find_branch = [&](const std::string& g, const std::string& s) -> const SaddleBranch* {
    for (const auto& br : er.branches)
      if (br.gluing == g && br.seed == s) return &br;
    return nullptr;
  };
  for (const char* g : kGluings)
    for (const char* s : kSeeds) {
      const SaddleBranch* br = find_branch(g, s);
      if (!br || !std::isfinite(br->action)) {
        out.solver_failed = true;
        std::cerr << "sykm: point " << pt.idx << ": branch " << g << "/" << s
                  << " missing or non-finite; row rejected\n";
        return out;
      }
      cells.push_back(format_g17(br->action));
      cells.push_back(br->converged ? "1" : "0");
      cells.push_back(std::to_string(br->iterations));
    }
  for (const char* s : kSeeds) {
    const SaddleBranch* br = find_branch("twisted", s);
    double s2b = br->converged ? params.n_flavor * (br->action - er.min_action_untwisted)
                               : std::numeric_limits<double>::infinity();
    // non-converged branches are reported as converged=0 above; keep the
    // branch entropy finite by falling back to the branch action difference
    if (!br->converged) s2b = params.n_flavor * (br->action - er.min_action_untwisted);
    if (!std::isfinite(s2b)) {
      out.solver_failed = true;
      return out;
    }
    cells.push_back(format_g17(s2b));
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // branch checkpoints for continuation by the next point in this shard
  if (branch_paths) {
    BoundarySpec bc_unt = BoundarySpec::untwisted(params.n_sites);
    BoundarySpec bc_tw =
        BoundarySpec::twist_region(params.n_sites, region.start, region.len);
    for (const auto& br : er.branches) {
      if (!br.result || !br.converged) continue;
      std::string key = br.gluing + "/" + br.seed;
      std::string path = ck_prefix + "_" + br.gluing + "_" + br.seed + ".sykm";
      const BoundarySpec& bc = br.gluing == "twisted" ? bc_tw : bc_unt;
      write_checkpoint(path,
                       run_header_json(params, grid, pt.err, bc, br.result->iterations,
                                       br.result->residual),
                       br.result->g, br.result->sigma);
      (*branch_paths)[key] = path;
    }
  }

  out.have_row = true;
  out.cells = std::move(cells);
  return out;
}

int cmd_entropy(const RunConfig& cfg, const RunOptions& opt, const std::string& raw) {
  std::vector<SweepPoint> pts = expand_sweep(cfg);
  if (pts.empty()) throw config_error("entropy: sweep axes must be non-empty");

  std::string out = out_path(cfg, opt, "entropy.csv");
  fs::path cache = fs::path(out.empty() ? "entropy.csv" : out).concat(".cache");
  fs::create_directories(cache);

  std::uint64_t hash = config_hash(raw);
  fs::path manifest = cache / "manifest.json";
  bool cache_valid = false;
  if (fs::exists(manifest)) {
    try {
      json m = json::parse(std::ifstream(manifest));
      cache_valid = m.at("config_hash").get<std::uint64_t>() == hash;
    } catch (...) {
      cache_valid = false;
    }
  }
  if (!opt.resume || !cache_valid) {
    std::ofstream mf(manifest);
    mf << json{{"config_hash", hash}}.dump();
    cache_valid = true;
  }

  Table table;
  table.columns = entropy_columns();
  std::atomic<bool> any_failed{false};
  std::atomic<int> done{0};

  int W = std::max(1, opt.workers);
  W = std::min<int>(W, int(pts.size()));
  int per = int((pts.size() + W - 1) / W);

  auto shard_worker = [&](int w) {
    int lo = w * per, hi = std::min<int>(int(pts.size()), (w + 1) * per);
    std::map<std::string, std::string> continuation;
    std::string prev_prefix, prev_prev_prefix;
    for (int k = lo; k < hi; ++k) {
      const SweepPoint& pt = pts[k];
      fs::path row_file = cache / ("point_" + std::to_string(pt.idx) + ".json");
      std::string ck_prefix = (cache / ("ck_" + std::to_string(pt.idx))).string();

      if (opt.resume && fs::exists(row_file)) {
        try {
          json r = json::parse(std::ifstream(row_file));
          if (r.at("failed").get<bool>()) {
            any_failed = true;
          } else {
            table.add(pt.idx, r.at("cells").get<std::vector<std::string>>());
          }
          // rebuild continuation from this point's checkpoints
          continuation.clear();
          for (const char* g : kGluings)
            for (const char* s : kSeeds) {
              std::string p = ck_prefix + "_" + std::string(g) + "_" + s + ".sykm";
              if (fs::exists(p)) continuation[std::string(g) + "/" + s] = p;
            }
          prev_prev_prefix = prev_prefix;
          prev_prefix = ck_prefix;
          ++done;
          continue;
        } catch (...) {
          // fall through and recompute
        }
      }

      std::map<std::string, std::string> branch_paths;
      EntropyPointOutcome oc;
      try {
        oc = entropy_point_row(cfg, pt, continuation, &branch_paths, ck_prefix);
      } catch (const Error& e) {
        std::cerr << "sykm: point " << pt.idx << " failed: " << e.what() << "\n";
        oc.solver_failed = true;
      }
      if (oc.have_row) table.add(pt.idx, oc.cells);
      if (oc.solver_failed) any_failed = true;

      {
        std::ofstream rf(row_file);
        rf << json{{"failed", !oc.have_row},
                   {"cells", oc.cells},
                   {"wall_seconds", oc.wall_seconds}}
                  .dump();
      }
      // keep this point's and its predecessor's checkpoints so a resumed
      // recomputation of the successor reseeds exactly as the original run
      if (!prev_prev_prefix.empty())
        for (const char* g : kGluings)
          for (const char* s : kSeeds) {
            std::error_code ec;
            fs::remove(prev_prev_prefix + "_" + std::string(g) + "_" + s + ".sykm", ec);
          }
      continuation = std::move(branch_paths);
      prev_prev_prefix = prev_prefix;
      prev_prefix = ck_prefix;
      int d = ++done;
      if (opt.verbose)
        std::cerr << "sykm: [" << d << "/" << pts.size() << "] point " << pt.idx << " done\n";
    }
  };

  std::vector<std::thread> threads;
  for (int w = 0; w < W; ++w) threads.emplace_back(shard_worker, w);
  for (auto& t : threads) t.join();

  table.write(out);
  return any_failed ? 3 : 0;
}

// ----------------------------------------------------------------- solve --

int cmd_solve(const RunConfig& cfg, const RunOptions& opt) {
  ModelParams params = cfg.model;
  TimeGrid grid = cfg.grid_for(params.n_sites);

  BoundarySpec bc;
  if (!cfg.boundary.bottom_tags.empty() || !cfg.boundary.top_tags.empty()) {
    auto parse_tags = [&](const std::string& s) {
      if (int(s.size()) != params.n_sites)
        throw config_error("boundary tags must have one character per site");
      std::vector<EdgeTag> tags(params.n_sites);
      for (int i = 0; i < params.n_sites; ++i) {
        if (s[i] == 'I')
          tags[i] = EdgeTag::Identity;
        else if (s[i] == 'T')
          tags[i] = EdgeTag::Twist;
        else
          throw config_error("boundary tags must be 'I' or 'T'");
      }
      return tags;
    };
    bc = BoundarySpec::untwisted(params.n_sites);
    if (!cfg.boundary.bottom_tags.empty()) bc.bottom = parse_tags(cfg.boundary.bottom_tags);
    if (!cfg.boundary.top_tags.empty()) bc.top = parse_tags(cfg.boundary.top_tags);
  } else {
    bc = BoundarySpec::twist_region(params.n_sites, cfg.region.start,
                                    cfg.region.resolve(params.n_sites));
  }

  SolverConfig sc = cfg.solver;
  sc.seed.jitter = cfg.seed_jitter;
  sc.seed.jitter_seed = cfg.rng_seed;

  SaddleResult res = solve_saddle(params, grid, cfg.error, bc, sc);

  std::string base = out_path(cfg, opt, "solve");
  write_checkpoint(base + ".sykm",
                   run_header_json(params, grid, cfg.error, bc, res.iterations, res.residual),
                   res.g, res.sigma);

  json summary = {{"converged", res.converged},
                  {"iterations", res.iterations},
                  {"residual", res.residual},
                  {"sd_residual", res.sd_residual},
                  {"action", res.action},
                  {"action_imag", res.action_imag},
                  {"checkpoint", base + ".sykm"}};
  std::ofstream jf(base + ".json");
  jf << summary.dump(2) << "\n";

  OrderParameterField phi = order_parameters(res.g);
  std::ofstream pf(base + ".phi.csv");
  pf << "x,t,phi1,phi2\n";
  for (int x = 0; x < phi.n_sites; ++x)
    for (int j = 0; j <= phi.nt; ++j)
      pf << x << "," << format_g17(j * grid.dt) << ","
         << format_g17(phi.phi1[std::size_t(x) * (phi.nt + 1) + j]) << ","
         << format_g17(phi.phi2[std::size_t(x) * (phi.nt + 1) + j]) << "\n";

  if (opt.verbose)
    std::cerr << "sykm: solve " << (res.converged ? "converged" : "did NOT converge") << " in "
              << res.iterations << " iterations, residual " << res.residual << "\n";
  return res.converged ? 0 : 3;
}

// ------------------------------------------------------------ small cmds --

int cmd_zeta(const RunConfig& cfg, const RunOptions& opt) {
  if (cfg.sweeps.empty()) throw config_error("zeta: a mu_tilde sweep axis is required");
  Table t;
  t.columns = {"idx", "mu_tilde", "gamma", "U_tilde", "zeta"};
  int idx = 0;
  for (double g : cfg.zeta_gammas)
    for (double m : cfg.sweeps[0].values()) {
      double z = zeta_of_mu(m, g, cfg.model.U_tilde);
      t.add(idx, {std::to_string(idx), format_g17(m), format_g17(g),
                  format_g17(cfg.model.U_tilde), format_g17(z)});
      ++idx;
    }
  t.write(out_path(cfg, opt, "zeta.csv"));
  return 0;
}

int cmd_landau(const RunConfig& cfg, const RunOptions& opt) {
  if (cfg.sweeps.empty()) throw config_error("landau: a mu_tilde sweep axis is required");
  const LandauBlock& lb = cfg.landau;
  Table t;
  t.columns = {"idx",      "mu_tilde", "U_tilde",   "J",          "gamma",   "gamma_prime",
               "T_h",      "eta",      "a",         "e",          "r",       "lambda",
               "lambda_prime", "h",    "sigma",     "sigma0",     "h_field", "h_star",
               "h_star_valid", "e_c",  "e_c_clamped", "e_star",   "hp_e_c",  "hp_e_c_clamped",
               "I2",       "hp_I2",    "sigma_sym", "sigma_sym_valid"};
  int idx = 0;
  for (double m : cfg.sweeps[0].values()) {
    ModelParams p = ModelParams::make(cfg.model.J, cfg.model.U_tilde, m, cfg.model.q,
                                      cfg.model.n_sites, cfg.model.n_flavor, cfg.model.periodic);
    LandauCoeffs c = effective_coeffs(p, lb.gamma);
    LandauCoeffs c0 = effective_coeffs(p, 0.0);
    double sigma = c.lambda_prime < 0 ? line_tension(c) : 0.0;
    double sigma0 = c0.lambda_prime < 0 ? line_tension(c0) : 0.0;
    double sig_thr = lb.h_corrected_sigma
                         ? (effective_coeffs(p, lb.gamma_prime).lambda_prime < 0
                                ? line_tension(effective_coeffs(p, lb.gamma_prime))
                                : 0.0)
                         : sigma0;
    double h_field = gamma_to_field(p, lb.gamma_prime);

    WallGeometry geom;
    geom.T_h = lb.T_h;
    geom.a = lb.a;
    geom.eta = lb.eta;
    geom.e = lb.e;
    geom.n_sites = p.n_sites;
    geom.n_flavor = p.n_flavor;

    bool hstar_ok = lb.a > 0.5 && lb.T_h > 0;
    double hstar = hstar_ok ? pinning_field(geom, sig_thr) : 0.0;

    bool thr_ok = sig_thr > 0;
    ThresholdResult ec = thr_ok ? erasure_threshold(h_field, lb.T_h, sig_thr, lb.eta)
                                : ThresholdResult{};
    ThresholdResult hp = thr_ok ? hp_threshold(h_field, lb.T_h, sig_thr, lb.eta)
                                : ThresholdResult{};
    double hTh = h_field * lb.T_h;
    double den = 2.0 * sig_thr - hTh;
    double e_star = (thr_ok && den != 0.0) ? (sig_thr * (1.0 + lb.eta) - hTh) / den : 0.0;
    double i2 = thr_ok ? mutual_information(lb.e, geom, sig_thr, h_field) : 0.0;
    double hp_i2 = thr_ok ? hp_mutual_information(lb.e, geom, sig_thr, h_field) : 0.0;
    bool sym_ok = c.r > 0 && c.h > 0;
    double sig_sym = sym_ok ? symmetric_phase_tension(c, lb.sym_prefactor) : 0.0;

    t.add(idx, {std::to_string(idx), format_g17(m), format_g17(p.U_tilde), format_g17(p.J),
                format_g17(lb.gamma), format_g17(lb.gamma_prime), format_g17(lb.T_h),
                format_g17(lb.eta), format_g17(lb.a), format_g17(lb.e), format_g17(c.r),
                format_g17(c.lambda), format_g17(c.lambda_prime), format_g17(c.h),
                format_g17(sigma), format_g17(sigma0), format_g17(h_field), format_g17(hstar),
                hstar_ok ? "1" : "0", format_g17(ec.e_c), ec.clamped ? "1" : "0",
                format_g17(e_star), format_g17(hp.e_c), hp.clamped ? "1" : "0", format_g17(i2),
                format_g17(hp_i2), format_g17(sig_sym), sym_ok ? "1" : "0"});
    ++idx;
  }
  t.write(out_path(cfg, opt, "landau.csv"));
  return 0;
}

int cmd_wkb(const RunConfig& cfg, const RunOptions& opt) {
  const WkbBlock& wb = cfg.wkb;
  Table t;
  t.columns = {"idx", "side", "branch", "n", "E_wkb", "E_oracle", "rel_err"};
  int idx = 0;
  for (WallSide side : {WallSide::Plus, WallSide::Minus}) {
    WallPotential p{side, wb.sigma, wb.h, wb.T_h, wb.T};
    int nstar = wkb_trapped_count(p);
    int ntr = std::min(nstar, wb.n_max);
    std::vector<double> oracle = grid_diagonalize(p, wb.grid_points, nstar + wb.n_max);
    std::vector<double> trapped =
        ntr >= 1 ? wkb_trapped_energies(p, ntr) : std::vector<double>{};
    std::vector<double> extended = wkb_extended_energies(p, wb.n_max);
    const char* side_name = side == WallSide::Plus ? "plus" : "minus";
    for (int n = 1; n <= ntr; ++n) {
      double ew = trapped[n - 1], eo = oracle[n - 1];
      t.add(idx, {std::to_string(idx), side_name, "trapped", std::to_string(n), format_g17(ew),
                  format_g17(eo), format_g17(std::abs(ew - eo) / std::max(1e-300, std::abs(eo)))});
      ++idx;
    }
    for (int n = 1; n <= wb.n_max; ++n) {
      if (nstar + n - 1 >= int(oracle.size())) break;
      double ew = extended[n - 1], eo = oracle[nstar + n - 1];
      t.add(idx, {std::to_string(idx), side_name, "extended", std::to_string(n), format_g17(ew),
                  format_g17(eo), format_g17(std::abs(ew - eo) / std::max(1e-300, std::abs(eo)))});
      ++idx;
    }
  }
  t.write(out_path(cfg, opt, "wkb.csv"));
  return 0;
}

int cmd_framepot(const RunConfig& cfg, const RunOptions& opt) {
  if (cfg.sweeps.empty()) throw config_error("framepot: a t sweep axis is required");
  Table t;
  t.columns = {"idx", "m", "NL", "J", "U", "q", "t", "log_F", "excess_over_haar"};
  int idx = 0;
  double log_mfact = std::lgamma(cfg.framepot.m + 1.0);
  for (double tv : cfg.sweeps[0].values()) {
    FramePotentialInput in{cfg.framepot.m, cfg.framepot.NL, cfg.model.J, cfg.model.U,
                           cfg.model.q, tv};
    double lf = log_frame_potential(in);
    t.add(idx, {std::to_string(idx), std::to_string(cfg.framepot.m), format_g17(cfg.framepot.NL),
                format_g17(cfg.model.J), format_g17(cfg.model.U), std::to_string(cfg.model.q),
                format_g17(tv), format_g17(lf), format_g17(lf - log_mfact)});
    ++idx;
  }
  std::string out = out_path(cfg, opt, "framepot.csv");
  t.write(out);
  if (cfg.framepot.design_epsilon) {
    FramePotentialInput in{cfg.framepot.m, cfg.framepot.NL, cfg.model.J, cfg.model.U,
                           cfg.model.q, 0.0};
    json s = {{"design_time", design_time(in, *cfg.framepot.design_epsilon)},
              {"epsilon", *cfg.framepot.design_epsilon}};
    std::ofstream f(out + ".summary.json");
    f << s.dump(2) << "\n";
  }
  return 0;
}

std::vector<std::map<std::string, std::string>> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(f, line)) throw io_error("empty CSV: " + path);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  std::vector<std::string> cols = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cols.size() && i < cells.size(); ++i) row[cols[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_fit(const RunConfig& cfg, const RunOptions& opt) {
  Table t;
  t.columns = {"idx", "group", "n_points", "density", "intercept", "r2", "density_stderr"};
  int idx = 0;
  auto emit = [&](const std::string& group, const std::vector<std::pair<double, double>>& pts) {
    FitResult f = fit_entropy_density(pts);
    t.add(idx, {std::to_string(idx), group.empty() ? "all" : group,
                std::to_string(pts.size()), format_g17(f.density), format_g17(f.intercept),
                format_g17(f.r2), format_g17(f.density_stderr)});
    ++idx;
  };
  if (!cfg.fit.points.empty()) {
    emit("", cfg.fit.points);
  } else if (!cfg.fit.from_csv.empty()) {
    auto rows = read_csv(cfg.fit.from_csv);
    std::map<std::string, std::vector<std::pair<double, double>>> groups;
    for (auto& row : rows) {
      std::string key;
      for (const std::string& g : cfg.fit.group_by) {
        auto it = row.find(g);
        if (it == row.end()) throw config_error("fit: group column missing: " + g);
        key += g + "=" + it->second + ";";
      }
      auto xi = row.find(cfg.fit.x_col), yi = row.find(cfg.fit.y_col);
      if (xi == row.end() || yi == row.end())
        throw config_error("fit: x/y column missing in CSV");
      groups[key].emplace_back(std::stod(xi->second), std::stod(yi->second));
    }
    for (auto& [key, pts] : groups) emit(key, pts);
  } else {
    throw config_error("fit: provide points or from_csv");
  }
  t.write(out_path(cfg, opt, "fit.csv"));
  return 0;
}

}  // namespace

int run_command(const RunConfig& cfg, const RunOptions& opt, const std::string& raw) {
  if (cfg.command == "solve") return cmd_solve(cfg, opt);
  if (cfg.command == "entropy") return cmd_entropy(cfg, opt, raw);
  if (cfg.command == "zeta") return cmd_zeta(cfg, opt);
  if (cfg.command == "landau") return cmd_landau(cfg, opt);
  if (cfg.command == "wkb") return cmd_wkb(cfg, opt);
  if (cfg.command == "framepot") return cmd_framepot(cfg, opt);
  if (cfg.command == "fit") return cmd_fit(cfg, opt);
  throw config_error("unknown command: " + cfg.command);
}

}  // namespace sykm
