#include "aplab/exploration.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace aplab {
namespace {

// Appends `count` children of `parent` contiguously; returns the first child
// index. Tags and labels are filled in by the caller.
std::uint32_t attach(std::vector<TreeNode>& nodes, std::size_t parent, std::uint64_t count,
                     NodeKind kind) {
    const auto first = static_cast<std::uint32_t>(nodes.size());
    nodes[parent].first_child = first;
    nodes[parent].child_count = static_cast<std::uint32_t>(count);
    TreeNode child;
    child.parent = static_cast<std::uint32_t>(parent);
    child.kind = kind;
    nodes.insert(nodes.end(), count, child);
    return first;
}

}  // namespace

BpSampler::BpSampler(const SizePmf& phi, double t, std::uint32_t ell, std::uint64_t cap)
    : alias_(phi), poisson_(t), ell_(ell), cap_(cap) {
    phi.validate(1e-6);
    if (t < 0.0) throw std::invalid_argument("BpSampler: t must be >= 0");
    if (ell < 2 || ell > kMaxArity) throw std::invalid_argument("BpSampler: need 2 <= ell <= 16");
    if (cap == 0) throw std::invalid_argument("BpSampler: vertex-node budget must be positive");
    tree_.ell = ell;
}

const ExplorationTree& BpSampler::sample(RngStream& rng) {
    auto& nodes = tree_.nodes;
    nodes.clear();
    tree_.truncated = false;
    tree_.vertex_node_count = 0;

    nodes.push_back(TreeNode{});

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        switch (nodes[i].kind) {
            case NodeKind::Root:
            case NodeKind::Component: {
                const std::uint32_t r = alias_.sample(rng);
                if (tree_.vertex_node_count + r > cap_) {
                    tree_.truncated = true;
                    return tree_;
                }
                tree_.vertex_node_count += r;
                attach(nodes, i, r, NodeKind::Vertex);
                break;
            }
            case NodeKind::Vertex: {
                const std::uint32_t first = attach(nodes, i, ell_, NodeKind::Index);
                for (std::uint32_t j = 0; j < ell_; ++j)
                    nodes[first + j].tag = static_cast<std::uint8_t>(j + 1);
                break;
            }
            case NodeKind::Index: {
                attach(nodes, i, poisson_(rng), NodeKind::Tuple);
                break;
            }
            case NodeKind::Tuple: {
                const std::uint32_t first = attach(nodes, i, ell_ - 1, NodeKind::Component);
                for (std::uint32_t c = 0; c + 1 < ell_; ++c)
                    nodes[first + c].tag = static_cast<std::uint8_t>(c + 1);
                break;
            }
        }
    }
    return tree_;
}

ExplorationTree sample_bp(const SizePmf& phi, double t, std::uint32_t ell, std::uint64_t cap,
                          RngStream& rng) {
    BpSampler sampler(phi, t, ell, cap);
    return sampler.sample(rng);
}

void reconstruct_into(const ExplorationTree& tree, ReconstructedTuples& out,
                      std::vector<std::uint32_t>& comp_of_node) {
    if (tree.truncated)
        throw std::invalid_argument("reconstruct: tree is truncated");

    out.ell = tree.ell;
    out.degenerate = false;
    out.component_sizes.clear();
    out.slots.clear();
    out.tuple_labels.clear();

    const auto& nodes = tree.nodes;
    comp_of_node.assign(nodes.size(), kNoLabel);

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const TreeNode& node = nodes[i];
        if (node.kind != NodeKind::Root && node.kind != NodeKind::Component) continue;
        if (node.child_count == 0) {
            out.degenerate = true;
            return;
        }
        comp_of_node[i] = static_cast<std::uint32_t>(out.component_sizes.size());
        out.component_sizes.push_back(node.child_count);
    }

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const TreeNode& tuple = nodes[i];
        if (tuple.kind != NodeKind::Tuple) continue;
        const TreeNode& index_node = nodes[tuple.parent];
        const std::uint32_t j = index_node.tag;  // 1-based slot of the parent vertex
        const std::uint32_t owner = nodes[index_node.parent].parent;

        const std::size_t base = out.slots.size();
        out.slots.resize(base + tree.ell);
        out.slots[base + (j - 1)] = comp_of_node[owner];
        for (std::uint32_t c = 0; c < tuple.child_count; ++c) {
            const std::uint32_t comp = tuple.first_child + c;
            const std::uint32_t tau = nodes[comp].tag;
            const std::uint32_t slot = tau < j ? tau : tau + 1;  // 1-based
            out.slots[base + (slot - 1)] = comp_of_node[comp];
        }
        out.tuple_labels.push_back(tuple.label);
    }
}

ReconstructedTuples reconstruct(const ExplorationTree& tree) {
    ReconstructedTuples out;
    std::vector<std::uint32_t> scratch;
    reconstruct_into(tree, out, scratch);
    return out;
}

ComponentEvaluator::ComponentEvaluator(Rule rule) : rule_(std::move(rule)) {
    if (!rule_.is_size_rule())
        throw std::invalid_argument("eval_component: " + rule_.name() +
                                    " is not a size rule; a tuple replay cannot supply the state it reads");
}

std::uint32_t ComponentEvaluator::find(std::uint32_t c) {
    while (parent_[c] != c) {
        parent_[c] = parent_[parent_[c]];
        c = parent_[c];
    }
    return c;
}

std::uint64_t ComponentEvaluator::eval(const ReconstructedTuples& rec, RngStream& rng) {
    const std::size_t m = rec.tuple_count();
    order_.resize(m);
    std::iota(order_.begin(), order_.end(), 0u);
    for (std::size_t i = m; i > 1; --i)
        std::swap(order_[i - 1], order_[rng.next_below(i)]);
    return eval_ordered(rec, order_, rng);
}

std::uint64_t ComponentEvaluator::eval_ordered(const ReconstructedTuples& rec,
                                               std::span<const std::uint32_t> order,
                                               RngStream& rng) {
    if (rule_.arity() != rec.ell)
        throw std::invalid_argument("eval_component: rule arity does not match tree arity");
    if (rec.degenerate) return 0;

    const std::uint32_t ell = rec.ell;
    const auto comps = static_cast<std::uint32_t>(rec.component_sizes.size());
    parent_.resize(comps);
    std::iota(parent_.begin(), parent_.end(), 0u);
    size_ = rec.component_sizes;
    sizes_.resize(ell);
    group_.resize(ell);

    RuleContext ctx;  // size rules read only sizes and grouping
    std::array<std::uint32_t, kMaxArity> roots{};

    for (const std::uint32_t idx : order) {
        const std::uint32_t* slot = &rec.slots[static_cast<std::size_t>(idx) * ell];
        for (std::uint32_t j = 0; j < ell; ++j) {
            roots[j] = find(slot[j]);
            sizes_[j] = size_[roots[j]];
            std::uint8_t g = static_cast<std::uint8_t>(j);
            for (std::uint32_t i = 0; i < j; ++i) {
                if (roots[i] == roots[j]) {
                    g = group_[i];
                    break;
                }
            }
            group_[j] = g;
        }
        ctx.sizes = sizes_;
        ctx.group = group_;
        rule_.decide(ctx, rng, decision_);
        for (const auto& [a, b] : decision_.pairs) {
            const std::uint32_t ra = find(slot[a]);
            const std::uint32_t rb = find(slot[b]);
            if (ra == rb) continue;
            parent_[ra] = rb;
            size_[rb] += size_[ra];
        }
    }
    return size_[find(0)];
}

std::uint64_t eval_component(const Rule& rule, const ExplorationTree& tree, RngStream& rng) {
    ComponentEvaluator evaluator(rule);
    const ReconstructedTuples rec = reconstruct(tree);
    return evaluator.eval(rec, rng);
}

TupleGraph::TupleGraph(std::uint32_t n, std::uint32_t ell, std::vector<std::uint32_t> tuples_flat)
    : n_(n), ell_(ell), tuples_(std::move(tuples_flat)) {
    comp_of_.resize(n);
    std::iota(comp_of_.begin(), comp_of_.end(), 0u);
    build_indexes();
}

TupleGraph::TupleGraph(std::uint32_t n, std::uint32_t ell, std::vector<std::uint32_t> tuples_flat,
                       const std::vector<std::uint32_t>& component_of)
    : n_(n), ell_(ell), tuples_(std::move(tuples_flat)) {
    if (component_of.size() != n)
        throw std::invalid_argument("TupleGraph: component labelling size mismatch");
    comp_of_.resize(n);
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    remap.reserve(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        auto [it, inserted] = remap.try_emplace(component_of[v],
                                                static_cast<std::uint32_t>(remap.size()));
        comp_of_[v] = it->second;
    }
    build_indexes();
}

void TupleGraph::build_indexes() {
    if (n_ == 0) throw std::invalid_argument("TupleGraph: n must be positive");
    if (ell_ < 2 || ell_ > kMaxArity) throw std::invalid_argument("TupleGraph: need 2 <= ell <= 16");
    if (tuples_.size() % ell_ != 0)
        throw std::invalid_argument("TupleGraph: tuple array length not a multiple of ell");
    if (tuple_count() > 0xFFFFFFFFull)
        throw std::invalid_argument("TupleGraph: too many tuples for 32-bit labels");
    for (const std::uint32_t v : tuples_)
        if (v >= n_) throw std::out_of_range("TupleGraph: tuple vertex out of range");

    std::uint32_t comp_count = 0;
    for (const std::uint32_t c : comp_of_) comp_count = std::max(comp_count, c + 1);

    comp_start_.assign(comp_count + 1, 0);
    for (std::uint32_t v = 0; v < n_; ++v) ++comp_start_[comp_of_[v] + 1];
    for (std::uint32_t c = 0; c < comp_count; ++c) comp_start_[c + 1] += comp_start_[c];
    comp_members_.resize(n_);
    {
        std::vector<std::uint32_t> cursor(comp_start_.begin(), comp_start_.end() - 1);
        for (std::uint32_t v = 0; v < n_; ++v) comp_members_[cursor[comp_of_[v]]++] = v;
    }

    const std::uint64_t m = tuple_count();
    incid_start_.assign(n_ + 1, 0);
    for (std::uint64_t o = 0; o < m; ++o)
        for (std::uint32_t j = 0; j < ell_; ++j) ++incid_start_[slot(o, j) + 1];
    for (std::uint32_t v = 0; v < n_; ++v) incid_start_[v + 1] += incid_start_[v];
    incid_.resize(tuples_.size());
    {
        std::vector<std::uint32_t> cursor(incid_start_.begin(), incid_start_.end() - 1);
        for (std::uint64_t o = 0; o < m; ++o)
            for (std::uint32_t j = 0; j < ell_; ++j)
                incid_[cursor[slot(o, j)]++] = (o << 4) | j;
    }

    // duplicate-free tuple values: occurrences sorted by content, equal runs
    // share a value id
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    auto content_less = [this](std::uint32_t a, std::uint32_t b) {
        return std::lexicographical_compare(
            tuples_.begin() + static_cast<std::size_t>(a) * ell_,
            tuples_.begin() + static_cast<std::size_t>(a + 1) * ell_,
            tuples_.begin() + static_cast<std::size_t>(b) * ell_,
            tuples_.begin() + static_cast<std::size_t>(b + 1) * ell_);
    };
    auto content_equal = [this](std::uint32_t a, std::uint32_t b) {
        return std::equal(tuples_.begin() + static_cast<std::size_t>(a) * ell_,
                          tuples_.begin() + static_cast<std::size_t>(a + 1) * ell_,
                          tuples_.begin() + static_cast<std::size_t>(b) * ell_);
    };
    std::sort(order.begin(), order.end(), content_less);
    value_of_.resize(m);
    value_mult_.clear();
    for (std::uint64_t i = 0; i < m; ++i) {
        if (i == 0 || !content_equal(order[i - 1], order[i]))
            value_mult_.push_back(0);
        value_of_[order[i]] = static_cast<std::uint32_t>(value_mult_.size() - 1);
        ++value_mult_.back();
    }
}

std::span<const std::uint32_t> TupleGraph::component_members(std::uint32_t comp) const {
    return {comp_members_.data() + comp_start_[comp],
            comp_members_.data() + comp_start_[comp + 1]};
}

Explorer::Explorer(const TupleGraph& graph) : graph_(&graph) {
    vertex_stamp_.assign(graph.n(), 0);
    value_stamp_.assign(std::max<std::size_t>(graph.value_mult_.size(), 1), 0);
}

const ExplorationTree& Explorer::explore(std::uint32_t start, ExploreStats& stats) {
    const TupleGraph& g = *graph_;
    if (start >= g.n()) throw std::out_of_range("Explorer: start vertex out of range");

    stats = {};
    ++epoch_;
    const std::uint32_t ell = g.ell();
    auto& nodes = tree_.nodes;
    nodes.clear();
    tree_.ell = ell;
    tree_.truncated = false;
    tree_.vertex_node_count = 0;
    reached_.clear();

    // per-exploration "tested" marks live in value_stamp_ as set ids; any
    // stamp older than set_base predates this exploration
    const std::uint64_t set_base = set_counter_ + 1;

    nodes.push_back(TreeNode{});
    nodes[0].label = start;

    auto attach_members = [&](std::size_t parent, std::uint32_t comp) {
        const auto members = g.component_members(comp);
        const std::uint32_t first = attach(nodes, parent, members.size(), NodeKind::Vertex);
        for (std::size_t i = 0; i < members.size(); ++i) {
            nodes[first + i].label = members[i];
            vertex_stamp_[members[i]] = epoch_;
        }
        reached_.insert(reached_.end(), members.begin(), members.end());
        tree_.vertex_node_count += members.size();
    };

    attach_members(0, g.component_of(start));

    // Vertex nodes appear in creation order, so this scan is the breadth
    // first schedule; each vertex node's four-level expansion completes
    // before the next vertex node is taken up.
    for (std::size_t vi = 1; vi < nodes.size(); ++vi) {
        if (nodes[vi].kind != NodeKind::Vertex) continue;
        const std::uint32_t w = nodes[vi].label;

        const std::uint32_t first_index = attach(nodes, vi, ell, NodeKind::Index);
        for (std::uint32_t j = 0; j < ell; ++j)
            nodes[first_index + j].tag = static_cast<std::uint8_t>(j + 1);

        for (std::uint32_t j = 0; j < ell; ++j) {
            const std::size_t index_node = first_index + j;
            ++set_counter_;
            ++stats.sets_tested;

            // the found-tuple set: so-far untested arrivals with slot j = w
            set_occ_.clear();
            for (std::uint32_t e = g.incid_start_[w]; e < g.incid_start_[w + 1]; ++e) {
                const std::uint64_t entry = g.incid_[e];
                if ((entry & 0xF) != j) continue;
                const std::uint64_t occ = entry >> 4;
                const std::uint32_t vid = g.value_of_[occ];
                const std::uint64_t stamp = value_stamp_[vid];
                if (stamp >= set_base && stamp != set_counter_) continue;  // tested earlier
                value_stamp_[vid] = set_counter_;
                set_occ_.push_back(occ);
            }

            bool bad[4] = {false, false, false, false};
            comp_seen_.clear();
            for (const std::uint64_t occ : set_occ_) {
                if (g.value_mult_[g.value_of_[occ]] >= 2) bad[0] = true;
                for (std::uint32_t s = 0; s < ell; ++s) {
                    const std::uint32_t u = g.slot(occ, s);
                    if (s != j) {
                        if (vertex_stamp_[u] == epoch_) bad[1] = true;
                        comp_seen_.emplace_back(g.component_of(u),
                                                static_cast<std::uint32_t>(occ));
                    }
                    for (std::uint32_t s2 = s + 1; s2 < ell; ++s2)
                        if (g.component_of(u) == g.component_of(g.slot(occ, s2))) bad[2] = true;
                }
            }
            std::sort(comp_seen_.begin(), comp_seen_.end());
            for (std::size_t i = 1; i < comp_seen_.size(); ++i)
                if (comp_seen_[i].first == comp_seen_[i - 1].first &&
                    comp_seen_[i].second != comp_seen_[i - 1].second)
                    bad[3] = true;

            if (bad[0] || bad[1] || bad[2] || bad[3]) ++stats.bad_sets;
            for (int b = 0; b < 4; ++b)
                if (bad[b]) ++stats.bad_reason[b];

            const std::uint32_t first_tuple = attach(nodes, index_node, set_occ_.size(),
                                                     NodeKind::Tuple);
            for (std::size_t ti = 0; ti < set_occ_.size(); ++ti)
                nodes[first_tuple + ti].label = static_cast<std::uint32_t>(set_occ_[ti]);

            for (std::size_t ti = 0; ti < set_occ_.size(); ++ti) {
                const std::size_t tuple_node = first_tuple + ti;
                const std::uint64_t occ = nodes[tuple_node].label;
                const std::uint32_t first_comp = attach(nodes, tuple_node, ell - 1,
                                                        NodeKind::Component);
                for (std::uint32_t s = 0, c = 0; s < ell; ++s) {
                    if (s == j) continue;
                    nodes[first_comp + c].tag = static_cast<std::uint8_t>(s < j ? s + 1 : s);
                    nodes[first_comp + c].label = g.slot(occ, s);
                    ++c;
                }
                for (std::uint32_t c = 0; c + 1 < ell; ++c) {
                    const std::size_t comp_node = first_comp + c;
                    const std::uint32_t u = nodes[comp_node].label;
                    if (vertex_stamp_[u] == epoch_) {
                        nodes[comp_node].ignored = true;
                        continue;
                    }
                    attach_members(comp_node, g.component_of(u));
                }
            }
        }
    }
    return tree_;
}

}  // namespace aplab
