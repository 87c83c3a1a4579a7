#include "aplab/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aplab {

std::uint64_t RunConfig::steps_for_time(double t, std::uint64_t n) {
    if (t < 0.0) throw std::invalid_argument("steps_for_time: t must be >= 0");
    return static_cast<std::uint64_t>(t * static_cast<double>(n));
}

std::uint32_t RunConfig::census_limit_or_default() const {
    if (census_limit != 0) return census_limit;
    const double ln = std::log(static_cast<double>(std::max<std::uint64_t>(n, 2)));
    return static_cast<std::uint32_t>(std::max(1.0, std::ceil(ln * ln)));
}

std::uint64_t Snapshot::vertices_in_size(std::uint32_t k) const {
    for (const auto& [size, count] : components_by_size)
        if (size == k) return static_cast<std::uint64_t>(size) * count;
    return 0;
}

std::uint64_t Snapshot::vertices_in_size_at_least(std::uint32_t k) const {
    std::uint64_t total = 0;
    for (const auto& [size, count] : components_by_size)
        if (size >= k) total += static_cast<std::uint64_t>(size) * count;
    return total;
}

namespace {

Snapshot capture(ComponentForest& forest, std::uint64_t step, std::uint64_t n,
                 std::uint32_t census_limit) {
    Snapshot snap;
    snap.step = step;
    snap.t = static_cast<double>(step) / static_cast<double>(n);
    snap.components_by_size.assign(forest.size_histogram().begin(), forest.size_histogram().end());
    snap.sum_sq = forest.sum_sq();
    snap.susceptibility = forest.susceptibility();
    snap.largest = forest.largest();
    if (census_limit > 0) snap.census = forest.cycle_census(census_limit);
    return snap;
}

}  // namespace

StatsSeries run(const RunConfig& cfg) {
    if (cfg.n == 0) throw std::invalid_argument("run: n must be positive");
    if (cfg.n > (1ull << 31)) throw std::invalid_argument("run: n too large");
    const auto n = static_cast<std::uint32_t>(cfg.n);
    const std::uint32_t ell = cfg.rule.arity();

    std::vector<std::uint64_t> schedule = cfg.snapshot_steps;
    if (schedule.empty()) schedule.push_back(cfg.steps);
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
    if (schedule.back() > cfg.steps)
        throw std::invalid_argument("run: snapshot step beyond the last step");

    StatsSeries series;
    series.config = cfg;
    series.snapshots.reserve(schedule.size());
    if (cfg.record_tuples) {
        series.tuples.emplace();
        series.tuples->ell = ell;
        series.tuples->flat.reserve(cfg.steps * ell);
    }

    ComponentForest forest(n, cfg.duplicates == DuplicateEdges::Ignore);
    RngStream rng(cfg.seed, cfg.stream);
    const std::uint32_t census_limit = cfg.with_census ? cfg.census_limit_or_default() : 0;

    std::vector<std::uint32_t> vertices(ell);
    std::vector<std::uint32_t> roots(ell);
    std::vector<std::uint32_t> sizes(ell);
    std::vector<std::uint8_t> group(ell);
    RuleDecision decision;
    RuleContext ctx;
    ctx.n = cfg.n;

    std::size_t next_snap = 0;
    while (next_snap < schedule.size() && schedule[next_snap] == 0) {
        series.snapshots.push_back(capture(forest, 0, cfg.n, census_limit));
        ++next_snap;
    }

    for (std::uint64_t step = 1; step <= cfg.steps; ++step) {
        for (std::uint32_t j = 0; j < ell; ++j) {
            std::uint32_t v = static_cast<std::uint32_t>(rng.next_below(n));
            if (cfg.sampling == TupleSampling::Distinct) {
                bool repeat = true;
                while (repeat) {
                    repeat = false;
                    for (std::uint32_t i = 0; i < j; ++i) {
                        if (vertices[i] == v) {
                            v = static_cast<std::uint32_t>(rng.next_below(n));
                            repeat = true;
                            break;
                        }
                    }
                }
            }
            vertices[j] = v;
        }
        if (cfg.record_tuples)
            series.tuples->flat.insert(series.tuples->flat.end(), vertices.begin(), vertices.end());

        for (std::uint32_t j = 0; j < ell; ++j) {
            roots[j] = forest.find(vertices[j]);
            sizes[j] = forest.component_size(vertices[j]);
            std::uint8_t g = static_cast<std::uint8_t>(j);
            for (std::uint32_t i = 0; i < j; ++i) {
                if (roots[i] == roots[j]) {
                    g = group[i];
                    break;
                }
            }
            group[j] = g;
        }

        ctx.sizes = sizes;
        ctx.group = group;
        ctx.step = step;
        ctx.susceptibility = forest.susceptibility();
        cfg.rule.decide(ctx, rng, decision);

        for (const auto& [a, b] : decision.pairs) {
            // iid sampling can hand the same vertex to both slots; such a
            // pair is no edge at all and is skipped
            if (vertices[a] != vertices[b]) forest.add_edge(vertices[a], vertices[b]);
        }

        while (next_snap < schedule.size() && schedule[next_snap] == step) {
            series.snapshots.push_back(capture(forest, step, cfg.n, census_limit));
            ++next_snap;
        }
    }
    return series;
}

StatsSeries run_poisson(const Rule& rule, std::uint64_t n, double t, std::uint64_t seed,
                        std::uint64_t stream, bool record_tuples) {
    if (t < 0.0) throw std::invalid_argument("run_poisson: t must be >= 0");
    RunConfig cfg;
    cfg.n = n;
    cfg.rule = rule;
    cfg.seed = seed;
    cfg.stream = stream;
    cfg.record_tuples = record_tuples;
    // step count Po(t*n) from stream (seed, stream); the evolution itself
    // runs on a derived stream, independent of this draw
    RngStream rng(seed, stream);
    cfg.steps = rng.poisson(t * static_cast<double>(n));
    cfg.stream = hash_combine(stream, 0x706F6973736F6Eull);
    return run(cfg);
}

}  // namespace aplab
