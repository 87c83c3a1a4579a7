#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aplab/component_forest.hpp"
#include "aplab/rules.hpp"
#include "aplab/rng.hpp"

namespace aplab {

enum class TupleSampling : std::uint8_t {
    Iid,       // each slot uniform, independently (the base model)
    Distinct,  // slots resampled until the tuple has no repeats
};

enum class DuplicateEdges : std::uint8_t {
    Count,   // repeated pairs count as additional internal edges
    Ignore,  // repeated pairs are dropped (simple-graph variant)
};

struct RunConfig {
    std::uint64_t n = 0;
    Rule rule = Rule::er();
    std::uint64_t steps = 0;
    // Sorted unique step indices at which to record a snapshot; empty means
    // record only the final state.
    std::vector<std::uint64_t> snapshot_steps;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;  // replica id; replica r draws from stream (seed, r)
    TupleSampling sampling = TupleSampling::Iid;
    DuplicateEdges duplicates = DuplicateEdges::Count;
    std::uint32_t census_limit = 0;  // 0 -> ceil(log(n)^2)
    bool with_census = true;  // censuses cost O(n) per snapshot; scans that
                              // ignore them switch this off
    bool record_tuples = false;

    // Convenience: steps = floor(t*n) (rounding down, as usual).
    static std::uint64_t steps_for_time(double t, std::uint64_t n);
    std::uint32_t census_limit_or_default() const;
};

struct Snapshot {
    std::uint64_t step = 0;
    double t = 0.0;  // step / n
    // sparse histogram: (component size k, number of components of size k)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> components_by_size;
    std::uint64_t sum_sq = 0;
    double susceptibility = 1.0;
    std::uint32_t largest = 1;
    CycleCensus census;

    std::uint64_t vertices_in_size(std::uint32_t k) const;
    std::uint64_t vertices_in_size_at_least(std::uint32_t k) const;
};

struct TupleLog {
    std::uint32_t ell = 2;
    std::vector<std::uint32_t> flat;  // arrival order, ell entries per step

    std::uint64_t count() const { return ell == 0 ? 0 : flat.size() / ell; }
};

struct StatsSeries {
    RunConfig config;
    std::vector<Snapshot> snapshots;
    std::optional<TupleLog> tuples;
};

// Runs the discrete-step process: per step draw ell vertices, present their
// component sizes (and same-component grouping) to the rule, add the decided
// pairs as edges. Snapshots are captured exactly at the scheduled steps.
// Output is a pure function of (config); identical configs give identical
// series byte for byte.
StatsSeries run(const RunConfig& cfg);

// Continuous-time variant: the number of steps is drawn as Poisson(t*n)
// first, then the evolution proceeds exactly as run() with tuples presented
// in arrival order. Snapshots default to the final state.
StatsSeries run_poisson(const Rule& rule, std::uint64_t n, double t, std::uint64_t seed,
                        std::uint64_t stream = 0, bool record_tuples = false);

}  // namespace aplab
