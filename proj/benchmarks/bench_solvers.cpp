#include <benchmark/benchmark.h>

#include "fer/classical.hpp"
#include "fer/config.hpp"
#include "fer/ergodic.hpp"
#include "fer/risk.hpp"

namespace {

fer::RunConfig cfg() { return fer::default_config(); }

void BM_TridiagSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<double> sub(n, -1.0), dia(n, 4.0), sup(n, -1.0), rhs(n, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fer::solve_tridiag(sub, dia, sup, rhs));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_TridiagSolve)->Arg(1201)->Arg(4801);

void BM_ErgodicSolve(benchmark::State& state) {
    const fer::RunConfig c = cfg();
    const fer::Grid1D grid = c.make_grid(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fer::solve_ergodic(c.model, grid));
    }
}
BENCHMARK(BM_ErgodicSolve)->Arg(601)->Arg(1201)->Unit(benchmark::kMillisecond);

void BM_RiskSolve(benchmark::State& state) {
    const fer::RunConfig c = cfg();
    const fer::Grid1D grid = c.make_grid(1201);
    const fer::ErgodicSolution sol = fer::solve_ergodic(c.model, grid);
    const double T = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fer::solve_risk_bsde(c.model, sol, c.payoff, T,
                                                      static_cast<int>(T / 0.025),
                                                      fer::pde::RecordPolicy::none()));
    }
}
BENCHMARK(BM_RiskSolve)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ClassicalSolve(benchmark::State& state) {
    const fer::RunConfig c = cfg();
    const fer::Grid1D grid = c.make_grid(1201);
    const fer::GridFn g =
        fer::sample(grid, [&](double v) { return fer::payoff_at(c.payoff, v); });
    const double T = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fer::solve_classical(c.model, g, T,
                                                      static_cast<int>(T / 0.025),
                                                      fer::pde::RecordPolicy::none()));
    }
}
BENCHMARK(BM_ClassicalSolve)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
