#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "aplab/rng.hpp"
#include "aplab/rules.hpp"
#include "aplab/size_pmf.hpp"

namespace aplab {

inline constexpr std::uint32_t kNoLabel = 0xFFFFFFFFu;

enum class NodeKind : std::uint8_t { Root, Vertex, Index, Tuple, Component };

struct TreeNode {
    std::uint32_t parent = 0;
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;
    NodeKind kind = NodeKind::Root;
    std::uint8_t tag = 0;       // index-node type 1..ell, component-node type 1..ell-1
    bool ignored = false;       // component node whose vertex had been reached before
    std::uint32_t label = kNoLabel;  // finite graphs: vertex id / tuple arrival index
};

// Typed exploration tree. Node kinds alternate with depth: vertex nodes sit
// at depths 4i+1, index/tuple/component nodes at 4i+2 / 4i+3 / 4i+4. Each
// node's children occupy a contiguous index range, nodes[0] is the root.
struct ExplorationTree {
    std::uint32_t ell = 2;
    std::vector<TreeNode> nodes;
    bool truncated = false;
    std::uint64_t vertex_node_count = 0;
};

// Samples the idealized exploration branching process: the root gets R ~ phi
// vertex-node children; every vertex node gets ell index nodes; every index
// node Po(t) tuple nodes; every tuple node ell-1 component nodes; every
// component node again R ~ phi vertex nodes. Generation stops, marking the
// tree truncated, once the vertex-node budget would be exceeded.
class BpSampler {
public:
    BpSampler(const SizePmf& phi, double t, std::uint32_t ell, std::uint64_t cap);

    const ExplorationTree& sample(RngStream& rng);

private:
    AliasTable alias_;
    PoissonSampler poisson_;
    std::uint32_t ell_;
    std::uint64_t cap_;
    ExplorationTree tree_;
};

ExplorationTree sample_bp(const SizePmf& phi, double t, std::uint32_t ell, std::uint64_t cap,
                          RngStream& rng);

// Tuples and component sizes reconstructed from a tree's structure alone.
// Component 0 is the root's; slot j of a tuple names the component its
// j-th vertex lies in.
struct ReconstructedTuples {
    std::uint32_t ell = 2;
    bool degenerate = false;  // some component node had no children
    std::vector<std::uint32_t> component_sizes;
    std::vector<std::uint32_t> slots;         // ell entries per tuple
    std::vector<std::uint32_t> tuple_labels;  // arrival indices for finite trees

    std::size_t tuple_count() const { return ell == 0 ? 0 : slots.size() / ell; }
};

// Throws on truncated trees; degenerate trees come back flagged, with no
// tuples.
ReconstructedTuples reconstruct(const ExplorationTree& tree);
void reconstruct_into(const ExplorationTree& tree, ReconstructedTuples& out,
                      std::vector<std::uint32_t>& scratch);

// Replays a tree's reconstructed tuples to a size rule in uniform random
// order and returns the size of the component containing the root;
// degenerate trees yield 0 by convention. Rejects non-size rules, whose
// decisions could depend on state a replay cannot supply.
class ComponentEvaluator {
public:
    explicit ComponentEvaluator(Rule rule);

    std::uint64_t eval(const ReconstructedTuples& rec, RngStream& rng);
    // fixed presentation order, for exhaustive-order checks
    std::uint64_t eval_ordered(const ReconstructedTuples& rec,
                               std::span<const std::uint32_t> order, RngStream& rng);

private:
    Rule rule_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> sizes_;
    std::vector<std::uint8_t> group_;
    RuleDecision decision_;

    std::uint32_t find(std::uint32_t c);
};

std::uint64_t eval_component(const Rule& rule, const ExplorationTree& tree, RngStream& rng);

// A recorded continuous-time instance: the initial graph's components plus
// the multiset of arrived tuples, indexed for exploration.
class TupleGraph {
public:
    // Initial components are singletons (evolution from the empty graph).
    TupleGraph(std::uint32_t n, std::uint32_t ell, std::vector<std::uint32_t> tuples_flat);

    // Arbitrary initial component structure: component_of[v] is any
    // labelling with equal labels exactly for vertices sharing a component.
    TupleGraph(std::uint32_t n, std::uint32_t ell, std::vector<std::uint32_t> tuples_flat,
               const std::vector<std::uint32_t>& component_of);

    std::uint32_t n() const { return n_; }
    std::uint32_t ell() const { return ell_; }
    std::uint64_t tuple_count() const { return tuples_.size() / ell_; }
    std::uint32_t slot(std::uint64_t tuple, std::uint32_t j) const { return tuples_[tuple * ell_ + j]; }

    std::uint32_t component_of(std::uint32_t v) const { return comp_of_[v]; }
    std::span<const std::uint32_t> component_members(std::uint32_t comp) const;

private:
    friend class Explorer;

    void build_indexes();

    std::uint32_t n_;
    std::uint32_t ell_;
    std::vector<std::uint32_t> tuples_;
    std::vector<std::uint32_t> comp_of_;       // canonical component ids 0..C-1
    std::vector<std::uint32_t> comp_start_;    // CSR over comp_members_
    std::vector<std::uint32_t> comp_members_;
    std::vector<std::uint32_t> incid_start_;   // CSR over incid_: per vertex
    std::vector<std::uint64_t> incid_;         // (occurrence << 4) | slot
    std::vector<std::uint32_t> value_of_;      // occurrence -> duplicate-free value id
    std::vector<std::uint32_t> value_mult_;    // value id -> multiplicity in E_t
};

// Per-index-node tally of the four conditions that make a found-tuple set
// unreconstructable: a repeated tuple, a tuple hitting an already reached
// vertex, two slots of one tuple sharing an initial component, two tuples
// sharing an initial component.
struct ExploreStats {
    std::uint64_t sets_tested = 0;
    std::uint64_t bad_sets = 0;
    std::array<std::uint64_t, 4> bad_reason{};

    bool good() const { return bad_sets == 0; }
};

// Builds the finite-graph exploration tree rooted at a vertex, following
// the same schedule as the idealized process: per vertex node, index nodes
// 1..ell; per index node, the so-far untested arrived tuples matching that
// slot; per tuple, component nodes whose unreached vertices expand further.
// The tree's vertex-node labels are exactly the component of the start
// vertex once all tuples are fully joined.
class Explorer {
public:
    explicit Explorer(const TupleGraph& graph);

    const ExplorationTree& explore(std::uint32_t start, ExploreStats& stats);

    // vertex labels reached by the last exploration, discovery order
    const std::vector<std::uint32_t>& reached() const { return reached_; }

private:
    const TupleGraph* graph_;
    ExplorationTree tree_;
    std::vector<std::uint32_t> reached_;
    std::vector<std::uint32_t> vertex_stamp_;
    std::vector<std::uint64_t> value_stamp_;  // set id at which a value was tested
    std::uint32_t epoch_ = 0;
    std::uint64_t set_counter_ = 0;
    std::vector<std::uint64_t> set_occ_;  // scratch: occurrences of the current set
    std::vector<std::pair<std::uint32_t, std::uint32_t>> comp_seen_;
};

}  // namespace aplab
