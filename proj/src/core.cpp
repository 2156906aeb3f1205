#include "gossip/core.hpp"

namespace gossip {

std::string agent_name(AgentId index) {
    if (index < 0) throw std::invalid_argument("negative agent index");
    std::string name(1, static_cast<char>('a' + index % 26));
    if (index >= 26) name += std::to_string(index / 26);
    return name;
}

GossipGraph make_initial(int n, const std::vector<std::pair<AgentId, AgentId>>& number_edges) {
    if (n < 1 || n > Relation::max_agents)
        throw std::invalid_argument("agent count must be in [1, 64]");
    GossipGraph g;
    g.n = n;
    g.N = Relation::identity(n);
    g.S = Relation::identity(n);
    for (auto [x, y] : number_edges) {
        if (x < 0 || x >= n || y < 0 || y >= n)
            throw std::invalid_argument("number edge out of range");
        g.N.add(x, y);
    }
    return g;
}

GossipGraph apply_sequence(const GossipGraph& g, const CallSequence& seq) {
    GossipGraph cur = g;
    for (size_t i = 0; i < seq.size(); ++i) {
        if (!is_possible(cur, seq[i]))
            throw SequenceError(static_cast<int>(i) + 1,
                                "call " + agent_name(seq[i].caller) + agent_name(seq[i].callee) +
                                    " at index " + std::to_string(i + 1) +
                                    " is not possible (caller lacks the callee's number)");
        cur = apply_call(cur, seq[i]);
    }
    return cur;
}

std::vector<AgentId> experts(const GossipGraph& g) {
    std::vector<AgentId> out;
    for (int x = 0; x < g.n; ++x)
        if (is_expert(g, x)) out.push_back(x);
    return out;
}

CallSequence local_history(const CallSequence& seq, AgentId x) {
    CallSequence out;
    for (const Call& c : seq)
        if (c.caller == x || c.callee == x) out.push_back(c);
    return out;
}

} // namespace gossip
