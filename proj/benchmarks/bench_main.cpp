#include <benchmark/benchmark.h>

#include <numbers>

#include "cqed/dynamics.hpp"
#include "cqed/info_rates.hpp"
#include "cqed/rng.hpp"
#include "cqed/steady_state.hpp"

namespace {

using namespace cqed;

SystemParams strong(double E, int n_max = 0) {
  SystemParams p;
  p.E = E;
  p.g = 1;
  p.phi = std::numbers::pi / 4;
  return with_centered_spec(p, n_max);
}

void BM_LiouvillianApply(benchmark::State& state) {
  const auto p = strong(10, static_cast<int>(state.range(0)));
  const CavityModel model(p);
  const Matrix rho = rho_ss_analytic(p).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(model.liouvillian(rho));
}
BENCHMARK(BM_LiouvillianApply)->Arg(16)->Arg(32)->Arg(64);

void BM_KrausStep(benchmark::State& state) {
  const auto p = strong(10, static_cast<int>(state.range(0)));
  const CavityModel model(p);
  const KrausStepper stepper(model, 1e-3);
  NormalStream rng(1);
  Matrix rho = rho_ss_analytic(p).matrix();
  for (auto _ : state) rho = stepper.step(rho, rng.wiener(1e-3));
}
BENCHMARK(BM_KrausStep)->Arg(16)->Arg(32)->Arg(64);

void BM_EulerMaruyamaStep(benchmark::State& state) {
  const auto p = strong(10, static_cast<int>(state.range(0)));
  const CavityModel model(p);
  NormalStream rng(1);
  Matrix rho = rho_ss_analytic(p).matrix();
  for (auto _ : state) rho = euler_maruyama_step(model, rho, 1e-3, rng.wiener(1e-3));
}
BENCHMARK(BM_EulerMaruyamaStep)->Arg(16)->Arg(32);

void BM_EntropyRateSeries(benchmark::State& state) {
  const auto p = strong(10, 16);
  const CavityModel model(p);
  const auto rho = rho_ss_analytic(p);
  const Matrix L = model.liouvillian(rho.matrix()), M = model.measurement(rho.matrix());
  for (auto _ : state) benchmark::DoNotOptimize(entropy_rate_series(rho, L, M, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_EntropyRateSeries)->Arg(50)->Arg(200);

void BM_EntropyRateMonteCarlo(benchmark::State& state) {
  const auto p = strong(10);
  for (auto _ : state) benchmark::DoNotOptimize(entropy_rate_monte_carlo(p, state.range(0), 1e-4, 1));
}
BENCHMARK(BM_EntropyRateMonteCarlo)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SteadyStateSolve(benchmark::State& state) {
  const auto p = strong(5, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_steady_state(p));
}
BENCHMARK(BM_SteadyStateSolve)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
