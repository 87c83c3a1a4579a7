#include "aplab/size_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aplab {

SizePmf SizePmf::delta(std::uint32_t k) {
    if (k == 0) throw std::invalid_argument("SizePmf: sizes start at 1");
    SizePmf pmf;
    pmf.entries_.emplace_back(k, 1.0);
    return pmf;
}

SizePmf SizePmf::from_probabilities(std::vector<std::pair<std::uint32_t, double>> entries,
                                    double remainder, double tol) {
    SizePmf pmf;
    std::sort(entries.begin(), entries.end());
    for (auto& [k, p] : entries) {
        if (k == 0) throw std::invalid_argument("SizePmf: sizes start at 1");
        if (p <= 0.0) throw std::invalid_argument("SizePmf: probabilities must be positive");
        if (!pmf.entries_.empty() && pmf.entries_.back().first == k)
            throw std::invalid_argument("SizePmf: duplicate size");
        pmf.entries_.emplace_back(k, p);
    }
    pmf.remainder_ = remainder;
    pmf.validate(tol);
    return pmf;
}

SizePmf SizePmf::from_counts(const std::vector<std::pair<std::uint32_t, std::uint64_t>>& counts,
                             std::uint64_t total) {
    if (total == 0) throw std::invalid_argument("SizePmf: total count must be positive");
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::uint64_t attributed = 0;
    for (const auto& [k, c] : counts) {
        if (c == 0) continue;
        entries.emplace_back(k, static_cast<double>(c) / static_cast<double>(total));
        attributed += c;
    }
    if (attributed > total) throw std::invalid_argument("SizePmf: counts exceed total");
    const double remainder = static_cast<double>(total - attributed) / static_cast<double>(total);
    return from_probabilities(std::move(entries), remainder, 1e-6);
}

double SizePmf::mass(std::uint32_t k) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), k,
                               [](const auto& e, std::uint32_t key) { return e.first < key; });
    return (it != entries_.end() && it->first == k) ? it->second : 0.0;
}

double SizePmf::total_mass() const {
    double sum = 0.0;
    for (const auto& [k, p] : entries_) sum += p;
    return sum;
}

double SizePmf::chi() const {
    double sum = 0.0;
    for (const auto& [k, p] : entries_) sum += static_cast<double>(k) * p;
    return sum;
}

SizePmf SizePmf::normalized() const {
    if (entries_.empty()) throw std::domain_error("SizePmf::normalized: no attributed mass");
    const double scale = 1.0 / total_mass();
    SizePmf pmf;
    pmf.entries_ = entries_;
    for (auto& [k, p] : pmf.entries_) p *= scale;
    return pmf;
}

SizePmf SizePmf::pruned(double min_mass) const {
    SizePmf pmf;
    pmf.remainder_ = remainder_;
    for (const auto& [k, p] : entries_) {
        if (p < min_mass)
            pmf.remainder_ += p;
        else
            pmf.entries_.emplace_back(k, p);
    }
    return pmf;
}

void SizePmf::validate(double tol) const {
    if (remainder_ < -tol) throw std::invalid_argument("SizePmf: negative remainder");
    const double total = total_mass() + remainder_;
    if (std::abs(total - 1.0) > tol)
        throw std::invalid_argument("SizePmf: mass does not sum to 1");
}

AliasTable::AliasTable(const SizePmf& pmf) {
    const auto& entries = pmf.entries();
    if (entries.empty()) throw std::invalid_argument("AliasTable: empty pmf");
    const std::size_t n = entries.size();
    const double scale = static_cast<double>(n) / pmf.total_mass();

    value_.resize(n);
    alias_.resize(n);
    threshold_.assign(n, 1.0);

    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        value_[i] = entries[i].first;
        alias_[i] = entries[i].first;
        scaled[i] = entries[i].second * scale;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        const std::size_t l = large.back();
        small.pop_back();
        threshold_[s] = scaled[s];
        alias_[s] = value_[l];
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
}

}  // namespace aplab
