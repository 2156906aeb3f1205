#include "gossip/classify.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>

namespace gossip {

namespace {

// Out-edges of x inside `active`, loops dropped.
uint64_t succ_in(const Relation& n, int x, uint64_t active) {
    return n.row(x) & active & ~Relation::bit(x);
}

// In-tree check over the agents in `active`: every node but one has exactly
// one successor, and following successors from anywhere reaches the root.
std::optional<int> tree_root_in(const Relation& n, uint64_t active) {
    int root = -1;
    for (uint64_t m = active; m; m &= m - 1) {
        int x = std::countr_zero(m);
        int deg = std::popcount(succ_in(n, x, active));
        if (deg == 0) {
            if (root >= 0) return std::nullopt;
            root = x;
        } else if (deg != 1) {
            return std::nullopt;
        }
    }
    if (root < 0) return std::nullopt; // some cycle covers every node
    for (uint64_t m = active; m; m &= m - 1) {
        int cur = std::countr_zero(m);
        for (int steps = 0; cur != root; ++steps) {
            if (steps > Relation::max_agents) return std::nullopt;
            cur = std::countr_zero(succ_in(n, cur, active));
        }
    }
    return root;
}

int in_degree_in(const Relation& n, int y, uint64_t active) {
    int deg = 0;
    for (uint64_t m = active & ~Relation::bit(y); m; m &= m - 1)
        if (n.contains(std::countr_zero(m), y)) ++deg;
    return deg;
}

bool is_bush_in(const Relation& n, uint64_t active, int expected_root) {
    auto root = tree_root_in(n, active);
    return root && *root == expected_root && in_degree_in(n, *root, active) >= 2;
}

// Weak components restricted to `active`, as masks ordered by smallest member.
std::vector<uint64_t> component_masks(const Relation& n, uint64_t active) {
    Relation sym = n.united(n.converse());
    std::vector<uint64_t> comps;
    uint64_t left = active;
    while (left) {
        uint64_t comp = Relation::bit(std::countr_zero(left));
        for (;;) {
            uint64_t grown = comp;
            for (uint64_t m = comp; m; m &= m - 1)
                grown |= sym.row(std::countr_zero(m)) & active;
            if (grown == comp) break;
            comp = grown;
        }
        comps.push_back(comp);
        left &= ~comp;
    }
    return comps;
}

// Candidate c must be a source whose only two out-edges name the two bush
// roots; removing it has to leave exactly the two bushes.
std::optional<std::array<AgentId, 3>> find_double_bush(const Relation& n, int agents) {
    uint64_t all = Relation::universe(agents);
    for (int c = 0; c < agents; ++c) {
        uint64_t succ = succ_in(n, c, all);
        if (std::popcount(succ) != 2) continue;
        if (in_degree_in(n, c, all) != 0) continue;
        int b = std::countr_zero(succ);
        int d = std::countr_zero(succ & (succ - 1));

        auto parts = component_masks(n, all & ~Relation::bit(c));
        if (parts.size() != 2) continue;
        uint64_t part_b = parts[0], part_d = parts[1];
        if (part_b & Relation::bit(d)) std::swap(part_b, part_d);
        if (!(part_b & Relation::bit(b)) || !(part_d & Relation::bit(d))) continue;

        // Each part plus c, with only c's edge into that part, must be a bush
        // rooted at the named successor. Masking the active set is enough: c's
        // other out-edge leaves the active set, so it vanishes from view.
        if (is_bush_in(n, part_b | Relation::bit(c), b) &&
            is_bush_in(n, part_d | Relation::bit(c), d))
            return std::array<AgentId, 3>{c, b, d};
    }
    return std::nullopt;
}

} // namespace

std::vector<AgentId> terminal_agents(const GossipGraph& g) {
    std::vector<AgentId> out;
    for (int x = 0; x < g.n; ++x)
        if (g.N.row(x) == Relation::bit(x)) out.push_back(x);
    return out;
}

SkinResult skin(const GossipGraph& g) {
    uint64_t drop = 0;
    for (AgentId t : terminal_agents(g)) drop |= Relation::bit(t);

    SkinResult out;
    std::vector<int> newindex(g.n, -1);
    for (int x = 0; x < g.n; ++x)
        if (!(drop & Relation::bit(x))) {
            newindex[x] = static_cast<int>(out.agents.size());
            out.agents.push_back(x);
        }

    int k = static_cast<int>(out.agents.size());
    out.graph.n = k;
    out.graph.N = Relation(k);
    out.graph.S = Relation(k);
    for (int x = 0; x < g.n; ++x) {
        if (newindex[x] < 0) continue;
        for (int y = 0; y < g.n; ++y) {
            if (newindex[y] < 0) continue;
            if (g.N.contains(x, y)) out.graph.N.add(newindex[x], newindex[y]);
            if (g.S.contains(x, y)) out.graph.S.add(newindex[x], newindex[y]);
        }
    }
    return out;
}

std::vector<int> weak_components(const Relation& n) {
    std::vector<uint64_t> masks = component_masks(n, Relation::universe(n.size()));
    std::vector<int> id(n.size(), -1);
    for (size_t i = 0; i < masks.size(); ++i)
        for (uint64_t m = masks[i]; m; m &= m - 1)
            id[std::countr_zero(m)] = static_cast<int>(i);
    return id;
}

GraphClass classify(const GossipGraph& g) {
    if (g.S != Relation::identity(g.n))
        throw std::invalid_argument("classification is defined on initial graphs (S must be the identity)");

    GraphClass out;
    uint64_t all = Relation::universe(g.n);

    std::vector<int> comp = weak_components(g.N);
    out.component_count = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    out.weakly_connected = out.component_count == 1;

    Relation reach = g.N.closure();
    out.strongly_connected = reach == Relation::full(g.n);
    out.complete = g.N == Relation::full(g.n);

    // Strongly connected components: x ~ y iff they reach each other.
    Relation back = reach.converse();
    out.scc_count = 0;
    for (int x = 0; x < g.n; ++x)
        if (std::countr_zero(reach.row(x) & back.row(x)) == x) ++out.scc_count;

    out.terminals = terminal_agents(g);

    SkinResult s = skin(g);
    bool skin_strong = s.graph.n == 0 || s.graph.N.closure() == Relation::full(s.graph.n);
    out.sun = out.weakly_connected && skin_strong;

    if (auto root = tree_root_in(g.N, all)) {
        out.tree = true;
        out.tree_root = *root;
        out.bush = in_degree_in(g.N, *root, all) >= 2;
    }

    out.double_bush_witness = find_double_bush(g.N, g.n);
    out.double_bush = out.double_bush_witness.has_value();
    return out;
}

} // namespace gossip
