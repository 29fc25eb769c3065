#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "sykm/checkpoint.hpp"
#include "sykm/config.hpp"
#include "sykm/runner.hpp"

using namespace sykm;

TEST_CASE("checkpoint round-trips bit-exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  EqualTimeGreens g = EqualTimeGreens::zeros(3, 10);
  SelfEnergy s = SelfEnergy::zeros(3, 10);
  for (auto& b : g.blk)
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) b(r, c) = cxd(u(rng), u(rng));
  for (auto& b : s.blk)
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) b(r, c) = cxd(u(rng), u(rng));

  std::string p1 = "/tmp/sykm_ck_a.sykm", p2 = "/tmp/sykm_ck_b.sykm";
  write_checkpoint(p1, "{\"note\":\"roundtrip\"}", g, s);
  Checkpoint ck = read_checkpoint(p1);
  CHECK(ck.g.n_sites == 3);
  CHECK(ck.g.nt == 10);
  for (std::size_t i = 0; i < g.blk.size(); ++i) {
    CHECK((ck.g.blk[i] - g.blk[i]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ck.sigma.blk[i] - s.blk[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  write_checkpoint(p2, ck.header_json, ck.g, ck.sigma);

  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("checkpoint rejects foreign files") {
  std::string p = "/tmp/sykm_ck_bad.sykm";
  std::ofstream(p) << "definitely not a checkpoint";
  CHECK_THROWS_AS((void)read_checkpoint(p), Error);
  CHECK_THROWS_AS((void)read_checkpoint("/tmp/does_not_exist.sykm"), Error);
}

TEST_CASE("config: strictness and defaults") {
  CHECK_THROWS_AS((void)parse_run_config("not json"), Error);
  CHECK_THROWS_AS((void)parse_run_config(R"({"version":1,"command":"zeta","typo":1})"), Error);
  CHECK_THROWS_AS(
      (void)parse_run_config(R"({"version":1,"command":"zeta","model":{"JJ":1.0}})"), Error);
  CHECK_THROWS_AS((void)parse_run_config(R"({"version":2,"command":"zeta"})"), Error);
  CHECK_THROWS_AS((void)parse_run_config(R"({"version":1,"command":"dance"})"), Error);

  RunConfig c = parse_run_config(R"({
    "version": 1, "command": "entropy",
    "model": {"J": 1.0, "U_tilde": 0.4, "mu_tilde": 0.6, "L": 8},
    "grid": {"dt": 0.05, "TJ_equals_L": true},
    "region": {"start": 0, "fraction": 0.5},
    "sweep": {"param": "mu_tilde", "start": 0.4, "stop": 2.0, "count": 5}
  })");
  CHECK(c.model.n_sites == 8);
  CHECK(c.region.resolve(8) == 4);
  CHECK(c.sweeps.size() == 1);
  CHECK(c.sweeps[0].values().size() == 5);
  CHECK(c.sweeps[0].values()[4] == doctest::Approx(2.0));
  TimeGrid g = c.grid_for(8);
  CHECK(g.T == doctest::Approx(8.0));
}

TEST_CASE("config: log axes and errors") {
  RunConfig c = parse_run_config(R"({
    "version": 1, "command": "zeta",
    "sweep": {"param": "mu_tilde", "start": 0.1, "stop": 10.0, "count": 3, "scale": "log"}
  })");
  auto v = c.sweeps[0].values();
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)parse_run_config(R"({
    "version": 1, "command": "zeta",
    "sweep": {"param": "mu_tilde", "start": -1.0, "stop": 1.0, "count": 3, "scale": "log"}
  })"),
                  Error);
  CHECK_THROWS_AS((void)parse_run_config(R"({
    "version": 1, "command": "zeta",
    "sweep": {"param": "nope", "start": 1.0, "stop": 2.0, "count": 3}
  })"),
                  Error);
}

TEST_CASE("g17 formatting round-trips doubles") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 200; ++k) {
    double v = u(rng) * std::pow(10.0, int(u(rng)) % 6);
    CHECK(std::stod(format_g17(v)) == v);
  }
}

TEST_CASE("runner: zeta table is written, sorted, and reproducible") {
  std::string cfg_text = R"({
    "version": 1, "command": "zeta",
    "model": {"U_tilde": 0.4},
    "zeta": {"gammas": [0.0, 0.2]},
    "sweep": {"param": "mu_tilde", "start": 0.2, "stop": 2.0, "count": 7}
  })";
  RunConfig cfg = parse_run_config(cfg_text);
  RunOptions opt;
  opt.out_override = "/tmp/sykm_zeta_test.csv";
  CHECK(run_command(cfg, opt, cfg_text) == 0);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  std::string first = slurp(opt.out_override);
  CHECK(run_command(cfg, opt, cfg_text) == 0);
  CHECK(slurp(opt.out_override) == first);
  CHECK(first.find("idx,mu_tilde,gamma,U_tilde,zeta") == 0);
  // gamma > 0 rows always satisfy zeta > gamma
  std::istringstream ss(first);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    double mu, gamma, ut, zeta;
    int idx;
    std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &idx, &mu, &gamma, &ut, &zeta);
    if (gamma > 0) CHECK(zeta > gamma);
  }
}

TEST_CASE("runner: fit command on inline points") {
  std::string cfg_text = R"({
    "version": 1, "command": "fit",
    "fit": {"points": [[8, 17.0], [10, 21.0], [12, 25.0]]}
  })";
  RunConfig cfg = parse_run_config(cfg_text);
  RunOptions opt;
  opt.out_override = "/tmp/sykm_fit_test.csv";
  CHECK(run_command(cfg, opt, cfg_text) == 0);
  std::ifstream f(opt.out_override);
  std::string header, row;
  std::getline(f, header);
  std::getline(f, row);
  CHECK(row.find("2,1,") != std::string::npos); // density=2, intercept=1
}
