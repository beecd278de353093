#include <benchmark/benchmark.h>

#include "pspin/coeffs.hpp"
#include "pspin/exact.hpp"
#include "pspin/meanfield.hpp"
#include "pspin/rng.hpp"
#include "pspin/sde.hpp"

using namespace pspin;

namespace {

ModelParams crf(int N) {
  ModelParams p;
  p.kappa_plus = 1.0;
  p.kappa_z = 1.0;
  p.B = Vec3(-0.8, 0.0, 0.0);
  p.N = N;
  return p;
}

void BM_Philox(benchmark::State& state) {
  const NormalStream s(1, 0);
  std::uint64_t step = 0;
  for (auto _ : state) benchmark::DoNotOptimize(s.pair(step++, 0));
}
BENCHMARK(BM_Philox);

void BM_SdeStepSphere(benchmark::State& state) {
  const ModelParams p = crf(40);
  SphericalPoint s{0.3, 1.0, 1.0};
  const Vec3 xi(0.1, -0.2, 0.0);
  for (auto _ : state) {
    s = sde_step(p, s, 1e-3, xi);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SdeStepSphere);

void BM_SdeStepBall(benchmark::State& state) {
  ModelParams p = crf(40);
  p.kappa_minus = p.kappa_plus;
  p.gamma_minus = 0.3;
  StepOptions opt;
  opt.mode = SdeMode::ball;
  SphericalPoint s{0.3, 1.0, 0.8};
  const Vec3 xi(0.1, -0.2, 0.05);
  for (auto _ : state) {
    s = sde_step(p, s, 1e-3, xi, opt);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SdeStepBall);

void BM_CollectiveApply(benchmark::State& state) {
  const ModelParams p = crf(static_cast<int>(state.range(0)));
  const Generator g(p, Basis::collective);
  const CMat rho = dicke_coherent_state({0.6, 0.0, 0.8}, p.N).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(g.apply(rho));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CollectiveApply)->RangeMultiplier(2)->Range(10, 320)->Complexity();

void BM_FullApply(benchmark::State& state) {
  ModelParams p = crf(static_cast<int>(state.range(0)));
  p.gamma_minus = 0.2;
  const Generator g(p, Basis::full);
  const CMat rho = coherent_state({0.6, 0.0, 0.8}, p.N).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(g.apply(rho));
}
BENCHMARK(BM_FullApply)->DenseRange(2, 6, 2);

void BM_MeanFieldRk4(benchmark::State& state) {
  const ModelParams p = crf(40);
  const std::vector<double> grid{0.0, 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_meanfield(p, {0, 0, 1}, grid));
}
BENCHMARK(BM_MeanFieldRk4)->Unit(benchmark::kMillisecond);

void BM_CartesianCoefficients(benchmark::State& state) {
  ModelParams p = crf(40);
  p.gamma_z = 0.1;
  const BlochVector r{0.2, -0.3, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(drift_diffusion_cartesian(p, r));
}
BENCHMARK(BM_CartesianCoefficients);

}  // namespace

BENCHMARK_MAIN();
