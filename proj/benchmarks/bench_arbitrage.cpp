#include <benchmark/benchmark.h>

#include "g3m/arbitrage.hpp"

using namespace g3m;

static void BM_CostUp(benchmark::State& state) {
    const PoolParams p{ 0.5, 0.99, 0.99 };
    const double wu = no_arb_interval(p).w_u_bound;
    double w = wu + 1e-4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cost_up(w, p));
    }
}
BENCHMARK(BM_CostUp);

static void BM_PostWeightUp(benchmark::State& state) {
    const PoolParams p{ 0.5, 0.99, 0.99 };
    const double wu = no_arb_interval(p).w_u_bound;
    for (auto _ : state) {
        benchmark::DoNotOptimize(post_weight_up(wu + 1e-4, p));
    }
}
BENCHMARK(BM_PostWeightUp);

static void BM_OptimalTrade(benchmark::State& state) {
    const PoolParams p{ 0.5, 0.9, 0.9 };
    const PoolState st{ 60.0, 100.0 };
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimal_trade(st, 0.4, p));
    }
}
BENCHMARK(BM_OptimalTrade);

static void BM_BruteForceOracle(benchmark::State& state) {
    const PoolParams p{ 0.5, 0.9, 0.9 };
    const PoolState st{ 60.0, 100.0 };
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute_force_arb_profit(st, 0.4, p, grid));
    }
}
BENCHMARK(BM_BruteForceOracle)->Arg(1000)->Arg(4096);
