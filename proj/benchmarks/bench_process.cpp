#include <benchmark/benchmark.h>

#include "aplab/process.hpp"

using namespace aplab;

static void run_rule(benchmark::State& state, const Rule& rule, double t) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        RunConfig cfg;
        cfg.n = n;
        cfg.rule = rule;
        cfg.steps = RunConfig::steps_for_time(t, n);
        cfg.seed = 3;
        cfg.stream = stream++;
        benchmark::DoNotOptimize(run(cfg));
    }
    state.SetItemsProcessed(state.iterations() * RunConfig::steps_for_time(t, n));
}

static void BM_RunEr(benchmark::State& state) { run_rule(state, Rule::er(), 0.5); }
BENCHMARK(BM_RunEr)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_RunProduct(benchmark::State& state) { run_rule(state, Rule::product(), 0.3); }
BENCHMARK(BM_RunProduct)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_RunRSum3(benchmark::State& state) { run_rule(state, Rule::r_sum(3), 0.3); }
BENCHMARK(BM_RunRSum3)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
