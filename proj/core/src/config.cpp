#include "sykm/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sykm {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw config_error(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw config_error("unknown key \"" + it.key() + "\" in " + where);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("bad value for \"") + key + "\"");
  }
}

ModelParams parse_model(const json& j) {
  check_keys(j, {"J", "U_tilde", "mu_tilde", "q", "L", "N_flavor", "periodic"}, "model");
  double J = get_or(j, "J", 1.0);
  return ModelParams::make(J, get_or(j, "U_tilde", 0.0), get_or(j, "mu_tilde", 0.0),
                           get_or(j, "q", 4), get_or(j, "L", 2), get_or(j, "N_flavor", 1),
                           get_or(j, "periodic", true));
}

ErrorProfile parse_error(const json& j) {
  check_keys(j, {"gamma_bulk", "gamma_boundary", "T_h", "erasure_sites"}, "error");
  ErrorProfile e;
  e.gamma_bulk = get_or(j, "gamma_bulk", 0.0);
  e.gamma_boundary = get_or(j, "gamma_boundary", 0.0);
  e.T_h = get_or(j, "T_h", 0.0);
  e.erasure_region = get_or(j, "erasure_sites", std::vector<int>{});
  return e;
}

SolverConfig parse_solver(const json& j) {
  check_keys(j, {"mixing", "tol", "max_iter"}, "solver");
  SolverConfig s;
  s.mixing = get_or(j, "mixing", 0.3);
  s.tol = get_or(j, "tol", 1e-9);
  s.max_iter = get_or(j, "max_iter", 500);
  return s;
}

SweepAxis parse_axis(const json& j) {
  check_keys(j, {"param", "start", "stop", "count", "scale"}, "sweep axis");
  SweepAxis a;
  a.param = get_or(j, "param", std::string());
  static const std::set<std::string> known = {"mu_tilde",       "U_tilde", "gamma_bulk",
                                              "gamma_boundary", "L",       "T",
                                              "T_h",            "t"};
  if (!known.count(a.param)) throw config_error("unknown sweep parameter \"" + a.param + "\"");
  a.start = get_or(j, "start", 0.0);
  a.stop = get_or(j, "stop", a.start);
  a.count = get_or(j, "count", 1);
  a.scale = get_or(j, "scale", std::string("linear"));
  if (a.scale != "linear" && a.scale != "log")
    throw config_error("sweep scale must be linear or log");
  if (a.count < 1) throw config_error("sweep count must be >= 1");
  if (a.scale == "log" && (a.start <= 0 || a.stop <= 0))
    throw config_error("log sweeps need positive endpoints");
  return a;
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> v;
  v.reserve(count);
  if (count == 1) {
    v.push_back(start);
    return v;
  }
  for (int i = 0; i < count; ++i) {
    double f = double(i) / (count - 1);
    if (scale == "log")
      v.push_back(start * std::pow(stop / start, f));
    else
      v.push_back(start + f * (stop - start));
  }
  return v;
}

int RegionBlock::resolve(int n_sites) const {
  if (length >= 0) return length;
  if (fraction >= 0.0) return int(std::lround(fraction * n_sites));
  return 0;
}

TimeGrid RunConfig::grid_for(int n_sites) const {
  double total = TJ_equals_L ? double(n_sites) / model.J : T;
  if (!(total > 0)) throw config_error("grid: T must be positive (or set TJ_equals_L)");
  return TimeGrid::from_T(total, dt);
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"version", "command", "model", "grid", "error", "region", "boundary", "solver",
              "sweep", "zeta", "landau", "wkb", "framepot", "fit", "output", "workers",
              "rng_seed", "seed_jitter"},
             "config");

  RunConfig c;
  c.version = get_or(j, "version", 0);
  if (c.version != 1) throw config_error("config version must be 1");
  c.command = get_or(j, "command", std::string());

  if (j.contains("model")) c.model = parse_model(j["model"]);
  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, {"dt", "T", "TJ_equals_L"}, "grid");
    c.dt = get_or(g, "dt", 0.05);
    c.T = get_or(g, "T", -1.0);
    c.TJ_equals_L = get_or(g, "TJ_equals_L", false);
  }
  if (j.contains("error")) c.error = parse_error(j["error"]);
  if (j.contains("region")) {
    const json& g = j["region"];
    check_keys(g, {"start", "length", "fraction"}, "region");
    c.region.start = get_or(g, "start", 0);
    c.region.length = get_or(g, "length", -1);
    c.region.fraction = get_or(g, "fraction", -1.0);
  }
  if (j.contains("boundary")) {
    const json& g = j["boundary"];
    check_keys(g, {"bottom_tags", "top_tags"}, "boundary");
    c.boundary.bottom_tags = get_or(g, "bottom_tags", std::string());
    c.boundary.top_tags = get_or(g, "top_tags", std::string());
  }
  if (j.contains("solver")) c.solver = parse_solver(j["solver"]);
  if (j.contains("sweep")) {
    const json& g = j["sweep"];
    if (g.is_array())
      for (const json& a : g) c.sweeps.push_back(parse_axis(a));
    else
      c.sweeps.push_back(parse_axis(g));
  }
  if (j.contains("zeta")) {
    const json& g = j["zeta"];
    check_keys(g, {"gammas"}, "zeta");
    c.zeta_gammas = get_or(g, "gammas", std::vector<double>{0.0});
  }
  if (j.contains("landau")) {
    const json& g = j["landau"];
    check_keys(g,
               {"gamma", "gamma_prime", "T_h", "eta", "a", "e", "sym_prefactor",
                "h_corrected_sigma"},
               "landau");
    c.landau.gamma = get_or(g, "gamma", 0.0);
    c.landau.gamma_prime = get_or(g, "gamma_prime", 0.0);
    c.landau.T_h = get_or(g, "T_h", 1.0);
    c.landau.eta = get_or(g, "eta", 0.0);
    c.landau.a = get_or(g, "a", 0.0);
    c.landau.e = get_or(g, "e", 0.0);
    c.landau.sym_prefactor = get_or(g, "sym_prefactor", 1.0);
    c.landau.h_corrected_sigma = get_or(g, "h_corrected_sigma", false);
  }
  if (j.contains("wkb")) {
    const json& g = j["wkb"];
    check_keys(g, {"sigma", "h", "T_h", "T", "n_max", "grid_points"}, "wkb");
    c.wkb.sigma = get_or(g, "sigma", 1.0);
    c.wkb.h = get_or(g, "h", 1.0);
    c.wkb.T_h = get_or(g, "T_h", 1.0);
    c.wkb.T = get_or(g, "T", 1.0);
    c.wkb.n_max = get_or(g, "n_max", 8);
    c.wkb.grid_points = get_or(g, "grid_points", 4000);
  }
  if (j.contains("framepot")) {
    const json& g = j["framepot"];
    check_keys(g, {"m", "NL", "design_epsilon"}, "framepot");
    c.framepot.m = get_or(g, "m", 2);
    c.framepot.NL = get_or(g, "NL", 100.0);
    if (g.contains("design_epsilon")) c.framepot.design_epsilon = g["design_epsilon"].get<double>();
  }
  if (j.contains("fit")) {
    const json& g = j["fit"];
    check_keys(g, {"points", "from_csv", "x_col", "y_col", "group_by"}, "fit");
    if (g.contains("points")) {
      for (const json& p : g["points"]) {
        if (!p.is_array() || p.size() != 2) throw config_error("fit points must be [x, y] pairs");
        c.fit.points.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
    c.fit.from_csv = get_or(g, "from_csv", std::string());
    c.fit.x_col = get_or(g, "x_col", std::string("L"));
    c.fit.y_col = get_or(g, "y_col", std::string("S2"));
    c.fit.group_by = get_or(g, "group_by", std::vector<std::string>{});
  }
  if (j.contains("output")) {
    const json& g = j["output"];
    check_keys(g, {"csv"}, "output");
    c.out_csv = get_or(g, "csv", std::string());
  }
  c.workers = get_or(j, "workers", 0);
  c.rng_seed = get_or(j, "rng_seed", std::uint64_t(0));
  c.seed_jitter = get_or(j, "seed_jitter", 0.0);

  static const std::set<std::string> commands = {"solve",  "entropy", "zeta", "landau",
                                                 "wkb",    "framepot", "fit"};
  if (!commands.count(c.command))
    throw config_error("command must be one of solve/entropy/zeta/landau/wkb/framepot/fit");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_header_json(const ModelParams& p, const TimeGrid& grid, const ErrorProfile& err,
                            const BoundarySpec& bc, int iteration, double residual) {
  json j;
  j["params"] = {{"J", p.J},       {"U_tilde", p.U_tilde}, {"mu_tilde", p.mu_tilde},
                 {"q", p.q},       {"L", p.n_sites},       {"N_flavor", p.n_flavor},
                 {"periodic", p.periodic}};
  j["grid"] = {{"T", grid.T}, {"dt", grid.dt}, {"nt", grid.nt}};
  j["err"] = {{"gamma_bulk", err.gamma_bulk},
              {"gamma_boundary", err.gamma_boundary},
              {"T_h", err.T_h},
              {"erasure_sites", err.erasure_region}};
  std::string bot(bc.bottom.size(), 'I'), top(bc.top.size(), 'I');
  for (std::size_t i = 0; i < bc.bottom.size(); ++i)
    bot[i] = bc.bottom[i] == EdgeTag::Twist ? 'T' : 'I';
  for (std::size_t i = 0; i < bc.top.size(); ++i)
    top[i] = bc.top[i] == EdgeTag::Twist ? 'T' : 'I';
  j["bc"] = {{"bottom", bot}, {"top", top}, {"region_start", bc.region_start},
             {"region_len", bc.region_len}};
  j["iteration"] = iteration;
  j["residual"] = residual;
  return j.dump();
}

std::uint64_t config_hash(const std::string& text) {
  // FNV-1a over the canonicalized dump
  std::string canon = json::parse(text).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sykm
