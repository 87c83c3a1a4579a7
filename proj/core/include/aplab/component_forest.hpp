#pragma once

#include <cstdint>
#include <map>
#include <unordered_set>
#include <vector>

namespace aplab {

enum class EdgeOutcome : std::uint8_t {
    Merged,     // endpoints were in distinct components
    Internal,   // endpoints already shared a component; internal edge count bumped
    Duplicate,  // simple-edge mode only: exact pair seen before, edge dropped
};

struct MergeInfo {
    EdgeOutcome outcome;
    std::uint32_t size_u;  // component sizes just before the edge
    std::uint32_t size_v;
};

struct CycleCensus {
    std::uint64_t tree_vertices = 0;        // vertices in tree components (any size)
    std::uint64_t unicyclic_vertices = 0;   // vertices in unicyclic components of size <= limit
    std::uint64_t complex_vertices = 0;     // vertices in complex components (any size)
    std::uint64_t complex_small_count = 0;  // complex components of size <= limit
    std::uint32_t size_limit = 0;
};

// Disjoint-set forest over n vertices that tracks, incrementally under edge
// insertion, every component statistic the size-rule processes consume:
// the sparse histogram {size -> #components}, the exact integer sum of
// squared component sizes (susceptibility numerator), the largest component
// and per-component internal edge counts (with multiplicity). Union by rank
// plus path halving; amortized near-constant per edge. Single writer, no
// internal locking; independent instances may live on different threads.
class ComponentForest {
public:
    // n singleton components. Throws std::invalid_argument for n == 0.
    // With track_simple_edges, exact duplicate pairs are dropped instead of
    // counting toward internal edges (the "edges not already present" model
    // variant).
    explicit ComponentForest(std::uint32_t n, bool track_simple_edges = false);

    // Adds edge {u,v}. Self-loops and out-of-range vertices throw.
    MergeInfo add_edge(std::uint32_t u, std::uint32_t v);

    std::uint32_t find(std::uint32_t v);
    bool same_component(std::uint32_t u, std::uint32_t v) { return find(u) == find(v); }

    std::uint32_t vertex_count() const { return n_; }
    std::uint64_t component_count() const { return components_; }
    std::uint64_t edges_added() const { return edges_added_; }

    std::uint32_t component_size(std::uint32_t v) { return comp_size_[find(v)]; }
    std::uint64_t internal_edges(std::uint32_t v) { return comp_edges_[find(v)]; }

    // Susceptibility S = sum of squared component sizes over n, kept exact
    // in integer arithmetic (sum_sq <= n^2 fits 64 bits for n < 2^31).
    std::uint64_t sum_sq() const { return sum_sq_; }
    double susceptibility() const { return static_cast<double>(sum_sq_) / static_cast<double>(n_); }

    std::uint32_t largest() const { return l1_; }

    // Sparse histogram: size k -> number of components of that size.
    const std::map<std::uint32_t, std::uint32_t>& size_histogram() const { return size_hist_; }

    // Number of vertices in components of size exactly k / at least k.
    std::uint64_t vertices_in_size(std::uint32_t k) const;
    std::uint64_t vertices_in_size_at_least(std::uint32_t k) const;

    // Classifies every component by edge excess e = edges - (size-1):
    // tree (e=0), unicyclic (e=1), complex (e>=2). unicyclic_vertices and
    // complex_small_count are restricted to components of size <= size_limit.
    CycleCensus cycle_census(std::uint32_t size_limit);

private:
    std::uint32_t n_;
    std::uint64_t components_;
    std::uint64_t edges_added_ = 0;
    std::uint64_t sum_sq_;
    std::uint32_t l1_ = 1;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> rank_;
    std::vector<std::uint32_t> comp_size_;
    std::vector<std::uint64_t> comp_edges_;
    std::map<std::uint32_t, std::uint32_t> size_hist_;
    bool simple_edges_ = false;
    std::unordered_set<std::uint64_t> edge_set_;
    std::vector<std::uint32_t> census_stamp_;
    std::uint32_t census_epoch_ = 0;
};

}  // namespace aplab
