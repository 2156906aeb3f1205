#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gossip/core.hpp"

namespace gossip {

// Structural verdicts about the number relation of an initial graph.
struct GraphClass {
    bool weakly_connected = false;
    bool strongly_connected = false;
    bool complete = false;
    std::vector<AgentId> terminals;
    bool sun = false;
    bool tree = false;
    std::optional<AgentId> tree_root;
    bool bush = false;
    bool double_bush = false;
    std::optional<std::array<AgentId, 3>> double_bush_witness; // (c, b, d)
    int component_count = 0;
    int scc_count = 0;
};

// Agents who know no number but their own.
std::vector<AgentId> terminal_agents(const GossipGraph& g);

// The graph with all terminal agents removed (applied once; skinning is not
// a closure operation). `agents` maps the new indices back to the original.
struct SkinResult {
    GossipGraph graph;
    std::vector<AgentId> agents;
};
SkinResult skin(const GossipGraph& g);

// Weak-connectivity component id per agent; ids ordered by smallest member.
std::vector<int> weak_components(const Relation& n);

// Classify the number relation of an initial graph (throws unless S = I).
//   sun:    weakly connected and the skin is empty or strongly connected
//   tree:   w.r.t. N minus loops, one root (out-degree 0), everyone else
//           out-degree 1, every agent reaches the root
//   bush:   tree whose root has in-degree >= 2
//   double bush: two bushes sharing one in-degree-0 node c whose only edges
//           point at the two roots
GraphClass classify(const GossipGraph& g);

} // namespace gossip
