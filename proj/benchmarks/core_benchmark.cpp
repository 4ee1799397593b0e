#include <benchmark/benchmark.h>

#include "ewb/barycenter.hpp"
#include "ewb/experiment.hpp"
#include "ewb/forecaster.hpp"
#include "ewb/measures.hpp"

namespace {

using namespace ewb;

Space space_for(int kind) {
  switch (kind) {
    case 0: return Space::euclidean_ball(2, 1.0);
    case 1: return Space::sphere_cap(0.7);
    case 2: return Space::hyperbolic_disk(1.0);
    case 3: return Space::spd_log_box(2, 1.0);
    default: return Space::quantile_box(64, 0.0, 1.0);
  }
}

void BM_Distance(benchmark::State& state) {
  const Space space = space_for(static_cast<int>(state.range(0)));
  const auto pts = sample_prior(space, 1024, 1);
  size_t i = 0;
  for (auto _ : state) {
    const double d = distance(space, pts[i & 1023], pts[(i * 7 + 3) & 1023]);
    benchmark::DoNotOptimize(d);
    ++i;
  }
}
BENCHMARK(BM_Distance)->DenseRange(0, 4);

void BM_LogSumExp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::VectorXd v(n);
  Rng rng(3);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-50.0, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_sum_exp(v));
  }
}
BENCHMARK(BM_LogSumExp)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_BarycenterSphere(benchmark::State& state) {
  const Space cap = Space::sphere_cap(0.7);
  const int n = static_cast<int>(state.range(0));
  ParticleMeasure pm = uniform_measure(sample_prior(cap, n, 5));
  for (auto _ : state) {
    const BarycenterResult r = barycenter(cap, pm);
    benchmark::DoNotOptimize(r.variance);
  }
}
BENCHMARK(BM_BarycenterSphere)->Arg(1000)->Arg(10000);

void BM_ForecasterRound(benchmark::State& state) {
  const Space disk = Space::euclidean_ball(2, 1.0);
  const int n_atoms = static_cast<int>(state.range(0));
  const auto losses = make_loss_sequence(disk, "squared_distance", 4096, 7);
  ForecasterState st = ewb_init(disk, n_atoms, Schedule::constant(0.125), 9);
  size_t t = 0;
  for (auto _ : state) {
    const Point x = ewb_predict(st);
    benchmark::DoNotOptimize(x.value.sum());
    ewb_update(st, losses[t & 4095]);
    ++t;
  }
}
BENCHMARK(BM_ForecasterRound)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
