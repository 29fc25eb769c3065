// sykm: batch front-end for the monitored Brownian SYK chain toolkit.
//
//   sykm <solve|entropy|zeta|landau|wkb|framepot|fit> --config cfg.json
//        [--out path] [--workers n] [--resume] [--verbose]
//
// Exit codes: 0 success, 2 config error, 3 solver non-convergence on all
// seeds for at least one sweep point (the table is still written).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sykm/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"monitored Brownian SYK chain toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  int workers = 0;
  bool resume = false, verbose = false;

  for (const char* name :
       {"solve", "entropy", "zeta", "landau", "wkb", "framepot", "fit"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_override, "output path (overrides config)");
    sub->add_option("--workers", workers, "worker threads (default: SYKM_WORKERS or 1)");
    sub->add_flag("--resume", resume, "reuse cached rows and checkpoints");
    sub->add_flag("--verbose", verbose, "progress to stderr");
  }

  CLI11_PARSE(app, argc, argv);
  std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << "sykm: cannot open config: " << config_path << "\n";
      return 2;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    std::string raw = ss.str();

    sykm::RunConfig cfg = sykm::parse_run_config(raw);
    if (cfg.command != command) {
      std::cerr << "sykm: config command \"" << cfg.command << "\" does not match subcommand \""
                << command << "\"\n";
      return 2;
    }

    sykm::RunOptions opt;
    opt.out_override = out_override;
    opt.resume = resume;
    opt.verbose = verbose;
    if (workers > 0)
      opt.workers = workers;
    else if (cfg.workers > 0)
      opt.workers = cfg.workers;
    else if (const char* env = std::getenv("SYKM_WORKERS"))
      opt.workers = std::max(1, std::atoi(env));
    else
      opt.workers = 1;

    return sykm::run_command(cfg, opt, raw);
  } catch (const sykm::Error& e) {
    std::cerr << "sykm: " << e.what() << "\n";
    return e.code() == sykm::ErrorCode::Config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "sykm: " << e.what() << "\n";
    return 1;
  }
}
