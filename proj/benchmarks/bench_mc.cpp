#include <benchmark/benchmark.h>

#include "fer/config.hpp"
#include "fer/parallel.hpp"
#include "fer/rng.hpp"
#include "fer/sde.hpp"

namespace {

void BM_CounterRng(benchmark::State& state) {
    std::uint64_t k = 0;
    double acc = 0.0;
    for (auto _ : state) {
        const fer::rng::NormalPair p = fer::rng::draw_normal_pair(42, k, k + 1);
        acc += p.z1 + p.z2;
        ++k;
    }
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_CounterRng);

void BM_FactorPaths(benchmark::State& state) {
    const fer::RunConfig c = fer::default_config();
    fer::McConfig mc;
    mc.n_paths = state.range(0);
    mc.n_steps = 500;
    fer::parallel::set_max_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) {
        const auto vals = fer::for_each_path(
            c.model, 10.0, 5.0, mc, {},
            [](std::int64_t, std::span<const double>, std::span<const double> p) {
                return p.back();
            });
        benchmark::DoNotOptimize(vals);
    }
    fer::parallel::set_max_threads(1);
    state.SetItemsProcessed(state.iterations() * mc.n_paths * mc.n_steps);
}
BENCHMARK(BM_FactorPaths)->Args({20000, 1})->Args({20000, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
