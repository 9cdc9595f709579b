#include <benchmark/benchmark.h>

#include <cstdint>

#include "cmbp/engine.hpp"
#include "cmbp/laws.hpp"
#include "cmbp/limit.hpp"
#include "cmbp/presets.hpp"
#include "cmbp/rng.hpp"
#include "cmbp/sampling.hpp"

namespace {

cmbp::ModelSpec promiscuous() {
  using cmbp::DiscreteLaw;
  return cmbp::presets::two_sex_promiscuous(
      DiscreteLaw::product({DiscreteLaw::poisson1(1.0), DiscreteLaw::poisson1(1.0)}),
      DiscreteLaw::product({DiscreteLaw::poisson1(1.0), DiscreteLaw::deterministic1(1)}));
}

void BM_PoissonSample(benchmark::State& state) {
  const double rate = static_cast<double>(state.range(0));
  cmbp::RngStream rng = cmbp::RngStream::from_root(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cmbp::poisson_sample(rng, rate));
  }
}
BENCHMARK(BM_PoissonSample)->Arg(1)->Arg(100);

void BM_IidSumAggregated(benchmark::State& state) {
  const std::int64_t count = state.range(0);
  cmbp::DiscreteLaw law =
      cmbp::DiscreteLaw::product({cmbp::DiscreteLaw::poisson1(1.0),
                                  cmbp::DiscreteLaw::table1({0, 1, 2}, {0.25, 0.5, 0.25})});
  cmbp::RngStream rng = cmbp::RngStream::from_root(2, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cmbp::sample_iid_sum(law, count, rng));
  }
}
BENCHMARK(BM_IidSumAggregated)->Arg(8)->Arg(1024)->Arg(1 << 16);

void BM_TrajectoryStep(benchmark::State& state) {
  cmbp::ModelSpec model = promiscuous();
  cmbp::Simulation sim(model, 0, 3);
  for (auto _ : state) {
    sim.advance();
    benchmark::DoNotOptimize(sim.state());
    if (sim.generation() > 4000) sim = cmbp::Simulation(model, 0, 3);
  }
}
BENCHMARK(BM_TrajectoryStep);

void BM_PsiN(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  cmbp::ModelSpec model = promiscuous();
  cmbp::Trajectory traj = cmbp::simulate_trajectory(model, n, 0, 7);
  cmbp::StepPath mart = cmbp::martingale_step_path(traj, model, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cmbp::psi_n(mart, n, model));
  }
}
BENCHMARK(BM_PsiN)->Arg(64)->Arg(512);

void BM_EulerMaruyama(benchmark::State& state) {
  const double dt = 1.0 / static_cast<double>(state.range(0));
  std::uint64_t id = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cmbp::euler_maruyama(2.0, 2.0, 1.0, dt, 11, id++));
  }
}
BENCHMARK(BM_EulerMaruyama)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
