#include <benchmark/benchmark.h>

#include "aplab/component_forest.hpp"
#include "aplab/rng.hpp"

using namespace aplab;

static void BM_AddEdgeRandom(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    RngStream rng(1);
    for (auto _ : state) {
        state.PauseTiming();
        ComponentForest forest(n);
        state.ResumeTiming();
        for (std::uint32_t i = 0; i < n / 2; ++i) {
            const auto u = static_cast<std::uint32_t>(rng.next_below(n));
            const auto v = static_cast<std::uint32_t>(rng.next_below(n));
            if (u != v) benchmark::DoNotOptimize(forest.add_edge(u, v));
        }
    }
    state.SetItemsProcessed(state.iterations() * (n / 2));
}
BENCHMARK(BM_AddEdgeRandom)->Arg(100000)->Arg(1000000);

static void BM_CycleCensus(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    RngStream rng(2);
    ComponentForest forest(n);
    for (std::uint32_t i = 0; i < n / 3; ++i) {
        const auto u = static_cast<std::uint32_t>(rng.next_below(n));
        const auto v = static_cast<std::uint32_t>(rng.next_below(n));
        if (u != v) forest.add_edge(u, v);
    }
    for (auto _ : state) benchmark::DoNotOptimize(forest.cycle_census(150));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CycleCensus)->Arg(100000)->Arg(1000000);
