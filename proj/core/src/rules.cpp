#include "aplab/rules.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <stdexcept>

namespace aplab {
namespace {

// Size-rule decision helpers. These deliberately take only the size list
// (and, where needed, the same-component grouping), never the rest of the
// context. Ties always resolve to the smallest slot index.

void decide_er(RuleDecision& out) {
    out.add(0, 1);
}

void decide_two_edge(std::span<const std::uint32_t> sizes, bool use_product, bool reverse,
                     RuleDecision& out) {
    const std::uint64_t first = use_product
        ? static_cast<std::uint64_t>(sizes[0]) * sizes[1]
        : static_cast<std::uint64_t>(sizes[0]) + sizes[1];
    const std::uint64_t second = use_product
        ? static_cast<std::uint64_t>(sizes[2]) * sizes[3]
        : static_cast<std::uint64_t>(sizes[2]) + sizes[3];
    const bool take_first = reverse ? first >= second : first <= second;
    if (take_first)
        out.add(0, 1);
    else
        out.add(2, 3);
}

void decide_bounded(std::span<const std::uint32_t> sizes, std::uint32_t cutoff, RuleDecision& out) {
    if (sizes[0] <= cutoff && sizes[1] <= cutoff)
        out.add(0, 1);
    else
        out.add(2, 3);
}

void decide_r_sum(std::span<const std::uint32_t> sizes, std::uint32_t r, RuleDecision& out) {
    std::uint32_t best = 0;
    std::uint64_t best_sum = static_cast<std::uint64_t>(sizes[0]) + sizes[1];
    for (std::uint32_t j = 1; j < r; ++j) {
        const std::uint64_t sum = static_cast<std::uint64_t>(sizes[2 * j]) + sizes[2 * j + 1];
        if (sum < best_sum) {
            best_sum = sum;
            best = j;
        }
    }
    out.add(static_cast<std::uint8_t>(2 * best), static_cast<std::uint8_t>(2 * best + 1));
}

void decide_min_pair(std::span<const std::uint32_t> sizes, RuleDecision& out) {
    std::uint8_t a = 0, b = 1;
    if (sizes[1] < sizes[0]) std::swap(a, b);
    for (std::uint8_t i = 2; i < sizes.size(); ++i) {
        if (sizes[i] < sizes[a]) {
            b = a;
            a = i;
        } else if (sizes[i] < sizes[b]) {
            b = i;
        }
    }
    out.add(std::min(a, b), std::max(a, b));
}

void decide_join_all(std::uint32_t ell, RuleDecision& out) {
    for (std::uint8_t a = 0; a + 1u < ell; ++a)
        for (std::uint8_t b = a + 1; b < ell; ++b)
            out.add(a, b);
}

std::uint32_t parse_param(std::string_view text, std::string_view key) {
    // accepts "<key>=<value>" after the rule name's colon
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || text.substr(0, eq) != key)
        throw std::invalid_argument("rule parameter must be '" + std::string(key) + "=<value>'");
    const auto digits = text.substr(eq + 1);
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size())
        throw std::invalid_argument("bad rule parameter value: " + std::string(digits));
    return value;
}

}  // namespace

void RuleDecision::add(std::uint8_t a, std::uint8_t b) {
    if (a == b) throw std::invalid_argument("RuleDecision: pair must join distinct slots");
    if (a > b) std::swap(a, b);
    for (const auto& p : pairs)
        if (p.first == a && p.second == b) return;
    pairs.emplace_back(a, b);
}

bool decision_is_forest(const RuleDecision& decision, std::uint32_t ell) {
    std::array<std::uint8_t, kMaxArity> root{};
    for (std::uint32_t i = 0; i < ell; ++i) root[i] = static_cast<std::uint8_t>(i);
    auto find = [&root](std::uint8_t v) {
        while (root[v] != v) v = root[v] = root[root[v]];
        return v;
    };
    for (const auto& [a, b] : decision.pairs) {
        if (a >= ell || b >= ell) return false;
        const std::uint8_t ra = find(a);
        const std::uint8_t rb = find(b);
        if (ra == rb) return false;
        root[ra] = rb;
    }
    return true;
}

Rule Rule::er() { return {Kind::Er, 2, 0, "er"}; }
Rule Rule::sum() { return {Kind::Sum, 4, 0, "sum"}; }
Rule Rule::product() { return {Kind::Product, 4, 0, "product"}; }
Rule Rule::reverse_sum() { return {Kind::ReverseSum, 4, 0, "reverse_sum"}; }
Rule Rule::reverse_product() { return {Kind::ReverseProduct, 4, 0, "reverse_product"}; }

Rule Rule::bounded(std::uint32_t cutoff) {
    if (cutoff == 0) throw std::invalid_argument("bounded rule: cutoff must be >= 1");
    return {Kind::Bounded, 4, cutoff, "bounded:B=" + std::to_string(cutoff)};
}

Rule Rule::r_sum(std::uint32_t r) {
    if (r == 0) throw std::invalid_argument("r_sum rule: r must be >= 1");
    if (2 * r > kMaxArity) throw std::invalid_argument("r_sum rule: arity too large");
    return {Kind::RSum, 2 * r, r, "r_sum:r=" + std::to_string(r)};
}

Rule Rule::min_pair(std::uint32_t ell) {
    if (ell < 2 || ell > kMaxArity) throw std::invalid_argument("min rule: need 2 <= ell <= 16");
    return {Kind::MinPair, ell, 0, "min:ell=" + std::to_string(ell)};
}

Rule Rule::join_all(std::uint32_t ell) {
    if (ell < 2 || ell > kMaxArity) throw std::invalid_argument("join_all rule: need 2 <= ell <= 16");
    return {Kind::JoinAll, ell, 0, "join_all:ell=" + std::to_string(ell)};
}

Rule Rule::take_or_leave(std::uint32_t cutoff) {
    if (cutoff == 0) throw std::invalid_argument("tioli rule: cutoff must be >= 1");
    return {Kind::TakeOrLeave, 4, cutoff, "tioli:B=" + std::to_string(cutoff)};
}

Rule Rule::take_or_leave(std::function<bool(const RuleContext&)> take_first, std::string label) {
    Rule rule{Kind::TakeOrLeave, 4, 0, "tioli:" + std::move(label)};
    rule.predicate_ = std::make_shared<const std::function<bool(const RuleContext&)>>(std::move(take_first));
    return rule;
}

Rule Rule::delayed_r_sum(std::uint32_t r) {
    if (r == 0) throw std::invalid_argument("d_r rule: r must be >= 1");
    if (2 * r > kMaxArity) throw std::invalid_argument("d_r rule: arity too large");
    return {Kind::DelayedRSum, 2 * r, r, "d_r:r=" + std::to_string(r)};
}

Rule Rule::delayed_min_pair(std::uint32_t ell) {
    if (ell < 2 || ell > kMaxArity) throw std::invalid_argument("c_ell rule: need 2 <= ell <= 16");
    return {Kind::DelayedMinPair, ell, 0, "c_ell:ell=" + std::to_string(ell)};
}

Rule Rule::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view tail = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    auto no_params = [&](Rule rule) {
        if (!tail.empty()) throw std::invalid_argument("rule takes no parameters: " + std::string(head));
        return rule;
    };

    if (head == "er") return no_params(er());
    if (head == "sum") return no_params(sum());
    if (head == "product") return no_params(product());
    if (head == "reverse_sum") return no_params(reverse_sum());
    if (head == "reverse_product") return no_params(reverse_product());
    if (head == "bounded") return bounded(parse_param(tail, "B"));
    if (head == "r_sum") return r_sum(parse_param(tail, "r"));
    if (head == "min") return min_pair(parse_param(tail, "ell"));
    if (head == "join_all") return join_all(parse_param(tail, "ell"));
    if (head == "tioli") return take_or_leave(parse_param(tail, "B"));
    if (head == "d_r") return delayed_r_sum(parse_param(tail, "r"));
    if (head == "c_ell") return delayed_min_pair(parse_param(tail, "ell"));
    throw std::invalid_argument("unknown rule: " + std::string(text));
}

bool Rule::is_size_rule() const {
    switch (kind_) {
        case Kind::TakeOrLeave:
            // the cutoff form reads only the first edge's sizes; a custom
            // predicate may query the graph through the context
            return predicate_ == nullptr;
        case Kind::DelayedRSum:  // switch on step/n
        case Kind::DelayedMinPair:
            return false;
        default:
            return true;
    }
}

bool Rule::is_acyclic() const {
    // every built-in adds a single pair except join_all, which is a forest
    // only for ell = 2
    return kind_ != Kind::JoinAll || arity_ == 2;
}

void Rule::decide(const RuleContext& ctx, RngStream& rng, RuleDecision& out) const {
    (void)rng;  // built-ins are deterministic; the stream is part of the interface
    if (ctx.sizes.size() != arity_ || ctx.group.size() != arity_)
        throw std::invalid_argument("Rule::decide: context arity mismatch for rule " + name_);
    out.clear();
    switch (kind_) {
        case Kind::Er:
            decide_er(out);
            break;
        case Kind::Sum:
            decide_two_edge(ctx.sizes, false, false, out);
            break;
        case Kind::Product:
            decide_two_edge(ctx.sizes, true, false, out);
            break;
        case Kind::ReverseSum:
            decide_two_edge(ctx.sizes, false, true, out);
            break;
        case Kind::ReverseProduct:
            decide_two_edge(ctx.sizes, true, true, out);
            break;
        case Kind::Bounded:
            decide_bounded(ctx.sizes, param_, out);
            break;
        case Kind::RSum:
            decide_r_sum(ctx.sizes, param_, out);
            break;
        case Kind::MinPair:
            decide_min_pair(ctx.sizes, out);
            break;
        case Kind::JoinAll:
            decide_join_all(arity_, out);
            break;
        case Kind::TakeOrLeave: {
            const bool take_first = predicate_
                ? (*predicate_)(ctx)
                : (std::max(ctx.sizes[0], ctx.sizes[1]) <= param_);
            out.add(take_first ? 0 : 2, take_first ? 1 : 3);
            break;
        }
        case Kind::DelayedRSum:
            if (2 * ctx.step <= ctx.n)
                decide_er(out);
            else
                decide_r_sum(ctx.sizes, param_, out);
            break;
        case Kind::DelayedMinPair:
            if (2 * ctx.step <= ctx.n)
                decide_er(out);
            else
                decide_min_pair(ctx.sizes, out);
            break;
    }
    if (out.pairs.empty())
        throw std::logic_error("Rule::decide: empty decision from rule " + name_);
}

}  // namespace aplab
