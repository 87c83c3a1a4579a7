#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aplab/rng.hpp"

namespace aplab {

// Sparse probability mass function over component sizes k >= 1.
// Mass that is tracked but not attributed to any size (pruned bins,
// truncated or degenerate samples) is kept in a separate remainder
// bucket, so total_mass() + remainder() accounts for exactly 1.
class SizePmf {
public:
    SizePmf() = default;

    static SizePmf delta(std::uint32_t k);

    // entries: (k, probability), k >= 1, probability > 0. Throws unless
    // sum + remainder is 1 within tol.
    static SizePmf from_probabilities(std::vector<std::pair<std::uint32_t, double>> entries,
                                      double remainder = 0.0, double tol = 1e-9);

    // counts[i] = (k, observed count); masses are counts/total and the
    // unattributed remainder is 1 - sum(counts)/total.
    static SizePmf from_counts(const std::vector<std::pair<std::uint32_t, std::uint64_t>>& counts,
                               std::uint64_t total);

    double mass(std::uint32_t k) const;
    double remainder() const { return remainder_; }
    double total_mass() const;

    // chi = sum k*p(k) over attributed bins (the first moment the interval
    // recursion consumes).
    double chi() const;

    std::uint32_t max_size() const { return entries_.empty() ? 0 : entries_.back().first; }
    bool empty() const { return entries_.empty(); }
    const std::vector<std::pair<std::uint32_t, double>>& entries() const { return entries_; }

    // Rescales attributed bins to sum to 1 and drops the remainder.
    SizePmf normalized() const;

    // Moves bins below min_mass into the remainder bucket.
    SizePmf pruned(double min_mass) const;

    void validate(double tol = 1e-9) const;

private:
    std::vector<std::pair<std::uint32_t, double>> entries_;  // sorted by k
    double remainder_ = 0.0;
};

// Walker alias table over a SizePmf's attributed bins (renormalized onto
// them), giving O(1) draws of the root-size variable the exploration BP
// consumes in bulk.
class AliasTable {
public:
    explicit AliasTable(const SizePmf& pmf);

    std::uint32_t sample(RngStream& rng) const {
        const std::size_t i = static_cast<std::size_t>(rng.next_below(value_.size()));
        return rng.next_double() < threshold_[i] ? value_[i] : alias_[i];
    }

private:
    std::vector<std::uint32_t> value_;
    std::vector<std::uint32_t> alias_;
    std::vector<double> threshold_;
};

}  // namespace aplab
