#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gossip/relation.hpp"

namespace gossip {

using AgentId = int;

// Presentation-only display name for an agent index: a..z, then a1, b1, ...
std::string agent_name(AgentId index);

// Gossip graph: N(x,y) = "x knows y's number", S(x,y) = "x knows y's secret".
// Both relations are reflexive by construction. Values are immutable in use:
// every call produces a new graph.
struct GossipGraph {
    int n = 0;
    Relation N;
    Relation S;

    bool operator==(const GossipGraph&) const = default;
};

// One call; the caller dials the callee. Self-calls are excluded here, at the
// type, so every consumer can rely on caller != callee.
struct Call {
    AgentId caller;
    AgentId callee;

    Call(AgentId x, AgentId y) : caller(x), callee(y) {
        if (x == y) throw std::invalid_argument("self-call " + agent_name(x) + agent_name(y));
    }

    bool operator==(const Call&) const = default;
};

using CallSequence = std::vector<Call>;

// Raised by apply_sequence; index is 1-based (first call = 1).
struct SequenceError : std::runtime_error {
    int index;
    SequenceError(int i, const std::string& what) : std::runtime_error(what), index(i) {}
};

// N = identity + number_edges, S = identity.
GossipGraph make_initial(int n, const std::vector<std::pair<AgentId, AgentId>>& number_edges);

inline bool is_possible(const GossipGraph& g, Call c) {
    return g.N.contains(c.caller, c.callee);
}

// The call merges the two participants' rows in both relations; nobody else
// changes. Precondition: is_possible(g, c).
inline GossipGraph apply_call(const GossipGraph& g, Call c) {
    GossipGraph out = g;
    uint64_t n = g.N.row(c.caller) | g.N.row(c.callee);
    uint64_t s = g.S.row(c.caller) | g.S.row(c.callee);
    out.N.set_row(c.caller, n);
    out.N.set_row(c.callee, n);
    out.S.set_row(c.caller, s);
    out.S.set_row(c.callee, s);
    return out;
}

// Left fold of apply_call; throws SequenceError at the first impossible call.
GossipGraph apply_sequence(const GossipGraph& g, const CallSequence& seq);

inline bool is_expert(const GossipGraph& g, AgentId x) {
    return g.S.row(x) == Relation::universe(g.n);
}

inline bool all_experts(const GossipGraph& g) {
    return g.S == Relation::full(g.n);
}

std::vector<AgentId> experts(const GossipGraph& g);

// Order-preserving restriction to the calls involving x (as either side).
CallSequence local_history(const CallSequence& seq, AgentId x);

} // namespace gossip
