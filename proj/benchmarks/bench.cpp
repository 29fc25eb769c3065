#include <benchmark/benchmark.h>

#include "sykm/contour.hpp"
#include "sykm/framepot.hpp"
#include "sykm/saddle.hpp"
#include "sykm/wkb.hpp"

using namespace sykm;

static void BM_equal_time_greens(benchmark::State& state) {
  const int nt = int(state.range(0));
  ModelParams p = ModelParams::make(1.0, 0.4, 0.8, 4, 1);
  TimeGrid grid{nt * 0.05, 0.05, nt};
  EqualTimeGreens g = EqualTimeGreens::zeros(1, nt);
  Mat8 blk = symmetric_equal_time_block(p, 0.5, 0.0, +1);
  for (auto& b : g.blk) b = blk;
  SelfEnergy sig = self_energy_update(g, p, {}, grid);
  SiteContourOperator op(SiteGluing::make(EdgeTag::Identity, EdgeTag::Identity), nt, grid.dt);
  std::vector<Mat8> out(nt + 1);
  for (auto _ : state) {
    cxd ld = op.equal_time_greens(sig.blk.data(), out.data());
    benchmark::DoNotOptimize(ld);
  }
}
BENCHMARK(BM_equal_time_greens)->Arg(80)->Arg(160)->Arg(320);

static void BM_solver_iteration(benchmark::State& state) {
  const int L = int(state.range(0));
  ModelParams p = ModelParams::make(1.0, 0.4, 0.8, 4, L);
  TimeGrid grid = TimeGrid::from_T(L / 2.0, 0.05);
  SolverConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-30;
  BoundarySpec bc = BoundarySpec::untwisted(L);
  for (auto _ : state) {
    SaddleResult r = solve_saddle(p, grid, {}, bc, cfg);
    benchmark::DoNotOptimize(r.residual);
  }
}
BENCHMARK(BM_solver_iteration)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_zeta_root(benchmark::State& state) {
  double mu = 0.3;
  for (auto _ : state) {
    double z = zeta_of_mu(mu, 0.2, 0.4);
    benchmark::DoNotOptimize(z);
    mu = mu < 3.0 ? mu + 1e-6 : 0.3;
  }
}
BENCHMARK(BM_zeta_root);

static void BM_log_frame_potential(benchmark::State& state) {
  FramePotentialInput in{6, 1e4, 1.0, 0.4, 4, 1.3};
  for (auto _ : state) {
    double lf = log_frame_potential(in);
    benchmark::DoNotOptimize(lf);
  }
}
BENCHMARK(BM_log_frame_potential);

static void BM_grid_diagonalize(benchmark::State& state) {
  WallPotential p{WallSide::Plus, 1.0, 1.0, 2.0, 8.0};
  for (auto _ : state) {
    auto ev = grid_diagonalize(p, int(state.range(0)), 8);
    benchmark::DoNotOptimize(ev.data());
  }
}
BENCHMARK(BM_grid_diagonalize)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
