#include "aplab/component_forest.hpp"

#include <stdexcept>

namespace aplab {

ComponentForest::ComponentForest(std::uint32_t n, bool track_simple_edges)
    : n_(n), components_(n), sum_sq_(n), simple_edges_(track_simple_edges) {
    if (n == 0) throw std::invalid_argument("ComponentForest: vertex count must be positive");
    parent_.resize(n);
    for (std::uint32_t v = 0; v < n; ++v) parent_[v] = v;
    rank_.assign(n, 0);
    comp_size_.assign(n, 1);
    comp_edges_.assign(n, 0);
    size_hist_[1] = n;
}

std::uint32_t ComponentForest::find(std::uint32_t v) {
    while (parent_[v] != v) {
        parent_[v] = parent_[parent_[v]];  // path halving
        v = parent_[v];
    }
    return v;
}

MergeInfo ComponentForest::add_edge(std::uint32_t u, std::uint32_t v) {
    if (u >= n_ || v >= n_) throw std::out_of_range("ComponentForest::add_edge: vertex out of range");
    if (u == v) throw std::invalid_argument("ComponentForest::add_edge: self-loops are not allowed");

    if (simple_edges_) {
        const std::uint64_t key = u < v
            ? (static_cast<std::uint64_t>(u) << 32) | v
            : (static_cast<std::uint64_t>(v) << 32) | u;
        if (!edge_set_.insert(key).second)
            return {EdgeOutcome::Duplicate, comp_size_[find(u)], comp_size_[find(v)]};
    }

    std::uint32_t ru = find(u);
    std::uint32_t rv = find(v);
    ++edges_added_;

    if (ru == rv) {
        ++comp_edges_[ru];
        return {EdgeOutcome::Internal, comp_size_[ru], comp_size_[rv]};
    }

    const std::uint32_t cu = comp_size_[ru];
    const std::uint32_t cv = comp_size_[rv];

    if (rank_[ru] < rank_[rv]) std::swap(ru, rv);
    if (rank_[ru] == rank_[rv]) ++rank_[ru];
    parent_[rv] = ru;

    const std::uint32_t merged = cu + cv;
    comp_size_[ru] = merged;
    comp_edges_[ru] = comp_edges_[ru] + comp_edges_[rv] + 1;
    --components_;

    // n*S gains exactly 2*cu*cv: (cu+cv)^2 - cu^2 - cv^2.
    sum_sq_ += 2ull * cu * cv;

    auto drop = [this](std::uint32_t k) {
        auto it = size_hist_.find(k);
        if (--(it->second) == 0) size_hist_.erase(it);
    };
    drop(cu);
    drop(cv);
    ++size_hist_[merged];
    if (merged > l1_) l1_ = merged;

    return {EdgeOutcome::Merged, cu, cv};
}

std::uint64_t ComponentForest::vertices_in_size(std::uint32_t k) const {
    auto it = size_hist_.find(k);
    return it == size_hist_.end() ? 0 : static_cast<std::uint64_t>(k) * it->second;
}

std::uint64_t ComponentForest::vertices_in_size_at_least(std::uint32_t k) const {
    std::uint64_t total = 0;
    for (auto it = size_hist_.lower_bound(k); it != size_hist_.end(); ++it)
        total += static_cast<std::uint64_t>(it->first) * it->second;
    return total;
}

CycleCensus ComponentForest::cycle_census(std::uint32_t size_limit) {
    if (size_limit == 0) throw std::invalid_argument("cycle_census: size limit must be positive");
    CycleCensus census;
    census.size_limit = size_limit;
    if (census_stamp_.empty()) census_stamp_.assign(n_, 0);
    ++census_epoch_;
    for (std::uint32_t v = 0; v < n_; ++v) {
        const std::uint32_t r = find(v);
        if (census_stamp_[r] == census_epoch_) continue;
        census_stamp_[r] = census_epoch_;
        const std::uint32_t size = comp_size_[r];
        const std::uint64_t edges = comp_edges_[r];
        const std::uint64_t excess = edges - (size - 1);  // edges >= size-1 always
        if (excess == 0) {
            census.tree_vertices += size;
        } else if (excess == 1) {
            if (size <= size_limit) census.unicyclic_vertices += size;
        } else {
            census.complex_vertices += size;
            if (size <= size_limit) ++census.complex_small_count;
        }
    }
    return census;
}

}  // namespace aplab
