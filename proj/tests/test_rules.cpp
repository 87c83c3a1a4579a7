#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "aplab/rules.hpp"

using namespace aplab;

namespace {

RuleDecision decide(const Rule& rule, std::vector<std::uint32_t> sizes,
                    std::uint64_t step = 1, std::uint64_t n = 1000) {
    std::vector<std::uint8_t> group(sizes.size());
    for (std::size_t i = 0; i < group.size(); ++i) group[i] = static_cast<std::uint8_t>(i);
    RuleContext ctx;
    ctx.sizes = sizes;
    ctx.group = group;
    ctx.step = step;
    ctx.n = n;
    RngStream rng(0);
    RuleDecision out;
    rule.decide(ctx, rng, out);
    return out;
}

using Pair = std::pair<std::uint8_t, std::uint8_t>;

}  // namespace

TEST_CASE("product and reverse product pick opposite candidate edges") {
    const auto forward = decide(Rule::product(), {3, 4, 2, 5});
    REQUIRE(forward.pairs.size() == 1);  // products 12 vs 10: take the second edge
    CHECK(forward.pairs[0] == Pair{2, 3});

    const auto reverse = decide(Rule::reverse_product(), {3, 4, 2, 5});
    REQUIRE(reverse.pairs.size() == 1);
    CHECK(reverse.pairs[0] == Pair{0, 1});
}

TEST_CASE("sum rules and ties") {
    CHECK(decide(Rule::sum(), {1, 2, 9, 9}).pairs[0] == Pair{0, 1});
    CHECK(decide(Rule::sum(), {5, 5, 9, 1}).pairs[0] == Pair{0, 1});  // tie: first pair
    CHECK(decide(Rule::reverse_sum(), {5, 5, 9, 1}).pairs[0] == Pair{0, 1});
    CHECK(decide(Rule::reverse_sum(), {1, 2, 9, 9}).pairs[0] == Pair{2, 3});
}

TEST_CASE("r-sum rule minimizes the pair sums") {
    const auto d = decide(Rule::r_sum(3), {5, 2, 1, 9, 3, 3});
    // pair sums 7, 10, 6
    CHECK(d.pairs[0] == Pair{4, 5});
    // ties resolve to the smallest pair index
    CHECK(decide(Rule::r_sum(2), {2, 2, 3, 1}).pairs[0] == Pair{0, 1});
}

TEST_CASE("er and min rules") {
    CHECK(decide(Rule::er(), {1, 1}).pairs[0] == Pair{0, 1});
    CHECK(decide(Rule::min_pair(4), {7, 2, 2, 5}).pairs[0] == Pair{1, 2});
    CHECK(decide(Rule::min_pair(4), {2, 7, 5, 2}).pairs[0] == Pair{0, 3});
    CHECK(decide(Rule::min_pair(2), {9, 1}).pairs[0] == Pair{0, 1});
}

TEST_CASE("bounded rule lumps sizes above the cutoff") {
    CHECK(decide(Rule::bounded(2), {1, 2, 9, 9}).pairs[0] == Pair{0, 1});
    CHECK(decide(Rule::bounded(2), {1, 3, 9, 9}).pairs[0] == Pair{2, 3});
}

TEST_CASE("take-it-or-leave-it forms") {
    CHECK(decide(Rule::take_or_leave(2), {2, 2, 5, 5}).pairs[0] == Pair{0, 1});
    CHECK(decide(Rule::take_or_leave(2), {3, 1, 5, 5}).pairs[0] == Pair{2, 3});
    CHECK(Rule::take_or_leave(2).is_size_rule());

    // predicate form may read the evolving graph, so it is not a size rule
    const Rule greedy = Rule::take_or_leave(
        [](const RuleContext& ctx) { return ctx.susceptibility < 2.0; }, "s_below_2");
    CHECK_FALSE(greedy.is_size_rule());
    CHECK(decide(greedy, {9, 9, 1, 1}).pairs[0] == Pair{0, 1});
}

TEST_CASE("switching rules change behaviour at step n/2") {
    const Rule d3 = Rule::delayed_r_sum(3);
    CHECK(d3.arity() == 6);
    CHECK_FALSE(d3.is_size_rule());
    // at step <= n/2 the first pair is taken regardless of the sums
    CHECK(decide(d3, {9, 9, 1, 1, 1, 1}, 500, 1000).pairs[0] == Pair{0, 1});
    CHECK(decide(d3, {9, 9, 1, 1, 1, 1}, 501, 1000).pairs[0] == Pair{2, 3});

    const Rule c4 = Rule::delayed_min_pair(4);
    CHECK(decide(c4, {9, 9, 1, 1}, 500, 1000).pairs[0] == Pair{0, 1});
    CHECK(decide(c4, {9, 9, 1, 1}, 501, 1000).pairs[0] == Pair{2, 3});
}

TEST_CASE("join_all emits every pair and is flagged cyclic beyond ell 2") {
    const auto d = decide(Rule::join_all(4), {1, 1, 1, 1});
    CHECK(d.pairs.size() == 6);
    CHECK_FALSE(Rule::join_all(4).is_acyclic());
    CHECK(Rule::join_all(2).is_acyclic());
    CHECK_FALSE(decision_is_forest(d, 4));
}

TEST_CASE("single-pair built-ins emit exactly one pair and stay acyclic") {
    RngStream rng(77);
    for (const Rule& rule : {Rule::er(), Rule::sum(), Rule::product(), Rule::reverse_sum(),
                             Rule::reverse_product(), Rule::bounded(2), Rule::r_sum(3),
                             Rule::min_pair(4)}) {
        CHECK(rule.is_acyclic());
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<std::uint32_t> sizes(rule.arity());
            for (auto& s : sizes) s = static_cast<std::uint32_t>(1 + rng.next_below(40));
            const auto d = decide(rule, sizes);
            CHECK(d.pairs.size() == 1);
            CHECK(decision_is_forest(d, rule.arity()));
        }
    }
}

TEST_CASE("validate_acyclic on explicit pair sets") {
    RuleDecision forest;
    forest.add(0, 1);
    forest.add(2, 3);
    CHECK(decision_is_forest(forest, 4));

    RuleDecision triangle;
    triangle.add(0, 1);
    triangle.add(1, 2);
    triangle.add(0, 2);
    CHECK_FALSE(decision_is_forest(triangle, 4));
}

TEST_CASE("size rules cannot see the step, the size of the graph or S") {
    RngStream rng(1234);
    for (const Rule& rule : {Rule::er(), Rule::sum(), Rule::product(), Rule::reverse_sum(),
                             Rule::reverse_product(), Rule::bounded(3), Rule::r_sum(2),
                             Rule::min_pair(4), Rule::join_all(3)}) {
        REQUIRE(rule.is_size_rule());
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<std::uint32_t> sizes(rule.arity());
            for (auto& s : sizes) s = static_cast<std::uint32_t>(1 + rng.next_below(30));
            std::vector<std::uint8_t> group(rule.arity());
            for (std::size_t i = 0; i < group.size(); ++i)
                group[i] = static_cast<std::uint8_t>(i);

            RuleContext a{sizes, group, 1, 10, 1.0};
            RuleContext b{sizes, group, 1 + rng.next_below(1u << 20), 10 + rng.next_below(1u << 20),
                          1.0 + rng.next_double() * 50};
            RuleDecision da, db;
            rule.decide(a, rng, da);
            rule.decide(b, rng, db);
            CHECK(da.pairs == db.pairs);
        }
    }
}

TEST_CASE("decision context must match the rule arity") {
    RngStream rng(0);
    RuleDecision out;
    std::vector<std::uint32_t> sizes{1, 1};
    std::vector<std::uint8_t> group{0, 1};
    RuleContext ctx{sizes, group, 1, 10, 1.0};
    CHECK_THROWS_AS(Rule::product().decide(ctx, rng, out), std::invalid_argument);
}

TEST_CASE("parse round trips and rejects junk") {
    for (const char* name : {"er", "sum", "product", "reverse_sum", "reverse_product",
                             "bounded:B=2", "r_sum:r=3", "min:ell=4", "join_all:ell=3",
                             "tioli:B=2", "d_r:r=3", "c_ell:ell=4"}) {
        const Rule rule = Rule::parse(name);
        CHECK(rule.name() == name);
        CHECK(Rule::parse(rule.name()).arity() == rule.arity());
    }
    CHECK_THROWS_AS(Rule::parse("frobnicate"), std::invalid_argument);
    CHECK_THROWS_AS(Rule::parse("r_sum:r=0"), std::invalid_argument);
    CHECK_THROWS_AS(Rule::parse("er:B=1"), std::invalid_argument);
    CHECK_THROWS_AS(Rule::parse("min:ell=1"), std::invalid_argument);
}
