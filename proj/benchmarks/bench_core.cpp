#include <benchmark/benchmark.h>

#include "csvortex/diagnostics.hpp"
#include "csvortex/omega.hpp"
#include "csvortex/seed.hpp"

using namespace csvortex;

static void BM_RhsLog(benchmark::State& state) {
    State s{0.0, -1.0, -2.0, 0.3, -0.4};
    for (auto _ : state) {
        auto d = rhs_log(s.t, s);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_RhsLog);

static void BM_Seed(benchmark::State& state) {
    const Params par{1.0, 2.0};
    const InitialData al{-3.0, -3.0};
    for (auto _ : state) {
        auto s = seed(par, al, 1e-3, 2);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_Seed);

static void BM_IntegrateNonTopological(benchmark::State& state) {
    const Params par{1.0, 2.0};
    const SeedState s = seed(par, {-8.0, -8.0});
    IntegrateOpts opts;
    for (auto _ : state) {
        auto traj = integrate(s, par, opts);
        benchmark::DoNotOptimize(traj.samples.size());
    }
}
BENCHMARK(BM_IntegrateNonTopological)->Unit(benchmark::kMillisecond);

static void BM_ClassifyPoint(benchmark::State& state) {
    const Params par{1.0, 2.0};
    for (auto _ : state) {
        auto [traj, cls] = solve_point(par, {-8.0, -8.0});
        benchmark::DoNotOptimize(cls.kind);
    }
}
BENCHMARK(BM_ClassifyPoint)->Unit(benchmark::kMillisecond);

static void BM_PohozaevResidual(benchmark::State& state) {
    const Params par{1.0, 2.0};
    const SeedState s = seed(par, {-8.0, -8.0});
    const Trajectory traj = integrate(s, par, {});
    for (auto _ : state) {
        double r = pohozaev_max_residual(traj);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_PohozaevResidual)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
