#include <benchmark/benchmark.h>

#include "armec/bcd.hpp"
#include "armec/channel.hpp"
#include "armec/rate.hpp"

using namespace armec;

namespace {

struct Fixture {
  ScenarioConfig cfg;
  ChannelSet ch;
  NoisePowers noise;
  SolutionState s;
};

Fixture make(int M) {
  ScenarioConfig cfg = default_config();
  cfg.num_elements = M;
  cfg.amp_budget_override_w = 10e-3;
  cfg = validate_config(cfg);
  const ChannelSet ch = synthesize_channels(build_geometry(cfg, 1), cfg, 1);
  const NoisePowers noise = noise_for(cfg, SurfaceMode::Active);
  return {cfg, ch, noise, init_solution(cfg, ch, SurfaceMode::Active, 1)};
}

void BM_ThetaQuadratics(benchmark::State& state) {
  const Fixture f = make(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_theta_quadratics(f.s.F, f.s.power, f.ch, f.s.aux_v, f.noise, f.cfg.bandwidth_hz));
  }
}
BENCHMARK(BM_ThetaQuadratics)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_ThetaConicSolve(benchmark::State& state) {
  const Fixture f = make(static_cast<int>(state.range(0)));
  const conic::ConvexProgram prog = build_theta_program(f.s, f.ch, f.noise, f.cfg, f.cfg.amp_budget_w);
  for (auto _ : state) benchmark::DoNotOptimize(conic::solve(prog));
}
BENCHMARK(BM_ThetaConicSolve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_BcdIteration(benchmark::State& state) {
  Fixture f = make(static_cast<int>(state.range(0)));
  f.cfg.algorithm.outer_max_iter = 1;
  f.cfg.algorithm.outer_tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(bcd_solve(f.cfg, f.ch, {.warm_start = f.s}));
}
BENCHMARK(BM_BcdIteration)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
