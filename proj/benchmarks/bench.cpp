#include "synclab/integrators.hpp"
#include "synclab/limit_cycle.hpp"
#include "synclab/models.hpp"
#include "synclab/phase_sync.hpp"
#include "synclab/reference.hpp"
#include "synclab/singular_sync.hpp"
#include "synclab/sliding_sync.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

using namespace synclab;

StateVec vec(std::initializer_list<double> v) {
  StateVec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double d : v) x[i++] = d;
  return x;
}

const LimitCycle& fhn_cycle() {
  static const LimitCycle cycle = find_limit_cycle(models::fhn(), vec({-0.7481, 1.5164}), 9.83);
  return cycle;
}

Reference orbit_reference() {
  return Reference(models::forced_master_nn(), models::master_orbit, 0.0, 4.0 * std::numbers::pi);
}

void BM_Rk4Step(benchmark::State& state) {
  const VectorField f = models::chaotic_cnn();
  StateVec x = vec({-1.0, 1.0, 1.0});
  for (auto _ : state) {
    x = rk4_step(f, 0.0, x, 1e-4);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Rk4Step);

void BM_Dopri5OnePeriod(benchmark::State& state) {
  const VectorField f = models::fhn();
  const StateVec x0 = vec({-0.7481, 1.5164});
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_adaptive(f, x0, 0.0, 9.8353, 1e-10, 1e-12, 0.05));
  }
}
BENCHMARK(BM_Dopri5OnePeriod)->Unit(benchmark::kMillisecond);

void BM_LimitCycleSearch(benchmark::State& state) {
  const VectorField f = models::fhn();
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_limit_cycle(f, vec({-0.7481, 1.5164}), 9.83));
  }
}
BENCHMARK(BM_LimitCycleSearch)->Unit(benchmark::kMillisecond);

void BM_DistanceIntegral(benchmark::State& state) {
  const LimitCycle& c = fhn_cycle();
  for (auto _ : state) {
    benchmark::DoNotOptimize(distance_integral(c, c, 1.0, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_DistanceIntegral)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

void BM_StaticRhs(benchmark::State& state) {
  const StaticFeedback fb({-3.5, -3.5, -3.5}, SlidingMode::Raw);
  const VectorField slave = models::chaotic_cnn();
  const Reference ref = orbit_reference();
  const StateVec x = vec({-1.0, 1.0, 1.0});
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(coupled_static_rhs(fb, slave, ref, t, x));
    t = t < 12.0 ? t + 1e-4 : 0.0;
  }
}
BENCHMARK(BM_StaticRhs);

void BM_DynamicRhs(benchmark::State& state) {
  const Matrix diag = -Matrix::Identity(3, 3);
  const StateVec xi0 = vec({-1.0, 1.0, 1.0});
  const DynamicFeedback fb(diag, SymMatrix(diag), 0.001, xi0);
  const VectorField slave = models::chaotic_cnn();
  const SFunction sf(orbit_reference(), SymMatrix(diag), xi0);
  const StateVec u = vec({0.1, -0.2, 0.3});
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(coupled_dynamic_rhs(fb, slave, sf, t, xi0, u));
    t = t < 12.0 ? t + 1e-4 : 0.0;
  }
}
BENCHMARK(BM_DynamicRhs);

}  // namespace

BENCHMARK_MAIN();
