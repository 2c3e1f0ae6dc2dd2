#include <vector>

#include <benchmark/benchmark.h>

#include "hybridom/gaussian.hpp"
#include "hybridom/linear_system.hpp"
#include "hybridom/phase_noise.hpp"
#include "hybridom/steady_state.hpp"

namespace {

using namespace hybridom;

struct Fixture {
  SystemParams params = SystemParams::paper_defaults();
  DerivedModel model = derive(params);
  SteadyState ss = solve_steady_state(model, params).back();
  LinearSystem sys = build_linear_system(model, params, ss);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_SteadyState(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(solve_steady_state(f.model, f.params));
}
BENCHMARK(BM_SteadyState);

void BM_BuildAndCheckStability(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(check_stability(build_linear_system(f.model, f.params, f.ss)));
}
BENCHMARK(BM_BuildAndCheckStability);

void BM_Lyapunov(benchmark::State& state) {
  const Fixture& f = fixture();
  const Eigen::MatrixXd a = f.sys.drift, d = f.sys.diffusion;
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov(a, d));
}
BENCHMARK(BM_Lyapunov);

void BM_EntanglementSweep(benchmark::State& state) {
  const Fixture& f = fixture();
  std::vector<double> grid;
  for (int i = 0; i < 201; ++i) grid.push_back(f.params.kappa * (-60.0 + 0.4 * i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(entanglement_sweep(f.model, f.params, grid, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_EntanglementSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SdeSteps(benchmark::State& state) {
  const Fixture& f = fixture();
  SdeRunConfig cfg;
  cfg.scheme = SdeScheme::exact;
  cfg.dt = 0.1 / f.params.omega_m;
  cfg.n_steps = 10000;
  cfg.n_trajectories = 2;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_sde(f.sys, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.n_steps * cfg.n_trajectories));
}
BENCHMARK(BM_SdeSteps)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
