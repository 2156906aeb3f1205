#pragma once

#include <cstdint>
#include <optional>

#include "gossip/engine.hpp"

namespace gossip {

enum class SuccessVerdict {
    strongly_successful,      // every maximal sequence ends with all experts
    weakly_successful_only,   // some do, but a stuck or infinite one exists
    unsuccessful,             // none do
};

struct InfiniteWitness {
    CallSequence stem;  // leads from the start into the loop
    CallSequence cycle; // returns to the state reached by the stem
};

struct SearchResult {
    SuccessVerdict verdict = SuccessVerdict::unsuccessful;
    std::optional<CallSequence> witness;       // a successful run
    std::optional<CallSequence> stuck_witness; // a maximal non-successful run
    std::optional<InfiniteWitness> infinite_witness;
    uint64_t states_visited = 0;
};

// Exhaustive depth-first search over abstract states (graph plus whatever
// memory the condition observes). Deterministic: children explored in
// (caller, callee) order, witnesses are the first of their kind found.
SearchResult decide_success(const GossipGraph& g, const ConditionExpr& cond);

// Length of a shortest successful sequence (breadth-first), if any.
std::optional<int> min_success_length(const GossipGraph& g, const ConditionExpr& cond);

struct ExtensionEntry {
    CallSequence sequence;
    bool maximal = false; // no permitted call extends it
};

// Every permitted sequence of length <= max_len, in depth-first (lexicographic)
// order, the empty sequence first. Pass nullopt for no length bound; that is
// accepted only when the condition provably admits finitely many sequences
// (every satisfiable reading forbids re-learning a secret or repeating a
// call), otherwise std::invalid_argument.
std::vector<ExtensionEntry> enumerate_extension(const GossipGraph& g, const ConditionExpr& cond,
                                                std::optional<size_t> max_len);

struct FairRunStats {
    uint64_t runs = 0;
    uint64_t successes = 0;
    uint64_t max_calls_observed = 0;
    uint64_t capped_runs = 0; // hit the cap, or provably could never finish
    uint64_t seed = 0;
};

// Repeated random executions: each step picks uniformly among permitted
// calls from one seeded pseudorandom stream. A run ends in success, in a
// stuck state, or is counted as capped. Runs that provably can neither
// terminate nor change state structure any more are capped without
// spinning out the remaining draws.
FairRunStats random_fair_runs(const GossipGraph& g, const ConditionExpr& cond, uint64_t runs,
                              uint64_t cap, uint64_t seed);

// Level-by-level sequence for trees: leaves first call everyone whose number
// they hold but whose secret they lack, then the enlarged frontier repeats,
// until nothing is left. The result never violates the learn-new-secrets
// condition and cannot be extended under it.
CallSequence bottom_up_sequence(const GossipGraph& g);

struct TreeSolution {
    CallSequence sequence;
    bool successful = false;
};

// Best learn-new-secrets run on a tree: when the root has a single
// predecessor this is a successful sequence (solve the tree below the root,
// bridge to the root, then everyone phones the root); otherwise the
// bottom-up sequence, which leaves the root's neighbours short.
TreeSolution solve_tree(const GossipGraph& g);

} // namespace gossip
