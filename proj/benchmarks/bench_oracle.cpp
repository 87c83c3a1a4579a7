#include <benchmark/benchmark.h>

#include "aplab/exploration.hpp"
#include "aplab/stitch.hpp"

using namespace aplab;

static void BM_SampleBp(benchmark::State& state) {
    const double t = static_cast<double>(state.range(0)) / 100.0;
    BpSampler sampler(SizePmf::delta(1), t, 2, 100000);
    RngStream rng(5);
    std::uint64_t nodes = 0;
    for (auto _ : state) {
        const ExplorationTree& tree = sampler.sample(rng);
        nodes += tree.vertex_node_count;
        benchmark::DoNotOptimize(tree.nodes.data());
    }
    state.counters["vertex_nodes_per_tree"] =
        benchmark::Counter(static_cast<double>(nodes) / state.iterations());
}
BENCHMARK(BM_SampleBp)->Arg(10)->Arg(25)->Arg(45);

static void BM_EstimateRho(benchmark::State& state) {
    RhoOptions opt;
    opt.samples = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_rho(Rule::product(), SizePmf::delta(1), 0.05, opt, 7));
    state.SetItemsProcessed(state.iterations() * opt.samples);
}
BENCHMARK(BM_EstimateRho)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_Stitch(benchmark::State& state) {
    StitchOptions opt;
    opt.samples = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(stitch(Rule::er(), 0.3, opt, 9));
}
BENCHMARK(BM_Stitch)->Arg(20000)->Arg(60000)->Unit(benchmark::kMillisecond);
