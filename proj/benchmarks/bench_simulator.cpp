#include <benchmark/benchmark.h>

#include "g3m/simulator.hpp"

using namespace g3m;

namespace {
const MarketParams kMarket{ 0.04, 0.02, 0.2 };
const PenaltyParams kPenalty{ 1.0, 0.5 };
}

// Throughput of the blocked rademacher/reflect kernel, reported in steps/s.
static void BM_EulerPaths(benchmark::State& state) {
    SimConfig cfg;
    cfg.n_paths = 256;
    cfg.master_seed = 1;
    cfg.horizon = HorizonMode::killed;
    cfg.workers = 1;
    const PoolParams pool{ 0.5, 0.99, 0.99 };
    double steps = 0.0;
    for (auto _ : state) {
        const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        benchmark::DoNotOptimize(stats.j_estimate);
        steps += stats.horizon / cfg.step_h * double(cfg.n_paths);
        ++cfg.master_seed;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_EulerPaths)->Unit(benchmark::kMillisecond);

static void BM_EulerPathsAdjust(benchmark::State& state) {
    SimConfig cfg;
    cfg.n_paths = 64;
    cfg.master_seed = 1;
    cfg.horizon = HorizonMode::killed;
    cfg.boundary = BoundaryMode::adjust;
    cfg.workers = 1;
    const PoolParams pool{ 0.5, 0.99, 0.99 };
    double steps = 0.0;
    for (auto _ : state) {
        const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        benchmark::DoNotOptimize(stats.j_estimate);
        steps += stats.horizon / cfg.step_h * double(cfg.n_paths);
        ++cfg.master_seed;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_EulerPathsAdjust)->Unit(benchmark::kMillisecond);

static void BM_LatticeWalk(benchmark::State& state) {
    SimConfig cfg;
    cfg.n_paths = 256;
    cfg.master_seed = 1;
    cfg.truncation_tol = 1e-4;
    cfg.workers = 1;
    const PoolParams pool{ 0.5, 0.9, 0.9 };
    const double xi = no_arb_interval(pool).width() / 16.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            random_walk_estimate(0.5, xi, cfg, kMarket, kPenalty, pool).j_estimate);
        ++cfg.master_seed;
    }
}
BENCHMARK(BM_LatticeWalk)->Unit(benchmark::kMillisecond);

static void BM_SolveValue(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_value(kMarket, kPenalty, 0.99, 0.99).c1);
    }
}
BENCHMARK(BM_SolveValue);
