#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aplab/rng.hpp"

namespace aplab {

inline constexpr std::uint32_t kMaxArity = 16;

// Everything a rule may see about one step. Size rules are dispatched to
// helpers that receive only (sizes, group), so they cannot read the step
// index, the vertex count or the susceptibility by construction; the extra
// fields exist for the switching rules and take-it-or-leave-it predicates.
struct RuleContext {
    std::span<const std::uint32_t> sizes;  // component size of each drawn vertex
    std::span<const std::uint8_t> group;   // group[i] = smallest slot index sharing i's component
    std::uint64_t step = 1;                // 1-based index of the step being decided
    std::uint64_t n = 0;
    double susceptibility = 1.0;
};

// A nonempty set of unordered slot pairs {a,b}, a < b, to be joined by
// edges. Duplicate insertions are ignored so the pair set stays a set.
struct RuleDecision {
    std::vector<std::pair<std::uint8_t, std::uint8_t>> pairs;

    void clear() { pairs.clear(); }
    void add(std::uint8_t a, std::uint8_t b);
};

// True iff the pairs contain no cycle on slots {0..ell-1}.
bool decision_is_forest(const RuleDecision& decision, std::uint32_t ell);

// Immutable rule specification. Values are cheap to copy and safe to share
// across threads; decide() is a pure function of (rule, context, rng draw).
class Rule {
public:
    enum class Kind : std::uint8_t {
        Er,              // always join v1v2 (ell = 2)
        Sum,             // 4 vertices, join the candidate pair with smaller size sum
        Product,         // 4 vertices, smaller size product
        ReverseSum,      // 4 vertices, larger size sum
        ReverseProduct,  // 4 vertices, larger size product
        Bounded,         // take v1v2 iff both its sizes are <= cutoff, else v3v4
        RSum,            // 2r vertices, join pair (2j-1,2j) minimizing the size sum
        MinPair,         // join the two slots with the smallest sizes
        JoinAll,         // join all slots pairwise (the all-edges upper process)
        TakeOrLeave,     // predicate on (graph, first pair) decides v1v2 vs v3v4
        DelayedRSum,     // v1v2 for the first n/2 steps, then the r-sum rule
        DelayedMinPair,  // v1v2 for the first n/2 steps, then the min rule
    };

    static Rule er();
    static Rule sum();
    static Rule product();
    static Rule reverse_sum();
    static Rule reverse_product();
    static Rule bounded(std::uint32_t cutoff);
    static Rule r_sum(std::uint32_t r);
    static Rule min_pair(std::uint32_t ell);
    static Rule join_all(std::uint32_t ell);
    static Rule take_or_leave(std::uint32_t cutoff);
    static Rule take_or_leave(std::function<bool(const RuleContext&)> take_first,
                              std::string label = "custom");
    static Rule delayed_r_sum(std::uint32_t r);
    static Rule delayed_min_pair(std::uint32_t ell);

    // Builds a rule from its addressable name, e.g. "product", "r_sum:r=3",
    // "bounded:B=2", "min:ell=4", "join_all:ell=3", "d_r:r=3",
    // "c_ell:ell=4", "tioli:B=2". Throws on unknown names or bad params.
    static Rule parse(std::string_view text);

    Kind kind() const { return kind_; }
    std::uint32_t arity() const { return arity_; }

    // Decision depends only on (sizes, group)?
    bool is_size_rule() const;

    // Edges added in one step always form a forest on the slots?
    bool is_acyclic() const;

    // Canonical addressable name; parse(name()) reconstructs the rule
    // (except for programmatic take-it-or-leave-it predicates).
    const std::string& name() const { return name_; }

    void decide(const RuleContext& ctx, RngStream& rng, RuleDecision& out) const;

private:
    Rule(Kind kind, std::uint32_t arity, std::uint32_t param, std::string name)
        : kind_(kind), arity_(arity), param_(param), name_(std::move(name)) {}

    Kind kind_;
    std::uint32_t arity_;
    std::uint32_t param_ = 0;
    std::shared_ptr<const std::function<bool(const RuleContext&)>> predicate_;
    std::string name_;
};

}  // namespace aplab
