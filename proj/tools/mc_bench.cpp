// Serial vs OpenMP Monte Carlo validation kernel.
//
//   cmake --build build --target atlas_mc_bench && ./build/atlas_mc_bench

#include <benchmark/benchmark.h>

#include "atlas/monte_carlo.hpp"

namespace {

atlas::CategoryAggregate bench_categories() {
    atlas::CategoryAggregate agg;
    agg.b = {86.36, 1.0};
    agg.c = {74.98, 1.07};
    agg.s = {73.37, 2.49};
    return agg;
}

void BM_mc_serial(benchmark::State& state) {
    const auto agg = bench_categories();
    const long trials = state.range(0);
    for (auto _ : state) {
        const auto report = atlas::mc_validate_serial(agg, trials, 42);
        benchmark::DoNotOptimize(report.ratio);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

void BM_mc_parallel(benchmark::State& state) {
    const auto agg = bench_categories();
    const long trials = state.range(0);
    atlas::McOptions options;
    options.parallel = true;
    for (auto _ : state) {
        const auto report = atlas::mc_validate(agg, trials, 42, options);
        benchmark::DoNotOptimize(report.ratio);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

}  // namespace

BENCHMARK(BM_mc_serial)->Arg(1 << 17)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_parallel)->Arg(1 << 17)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
