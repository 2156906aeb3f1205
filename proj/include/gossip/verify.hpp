#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gossip/core.hpp"

namespace gossip {

// Initial graphs on n agents pack into a bitmask over the n(n-1) off-diagonal
// cells: cell (x,y) sits at bit x*(n-1) + (y < x ? y : y-1). Identity edges
// stay implicit, so mask 0 is the edgeless graph.
uint64_t edge_mask(const GossipGraph& g);
GossipGraph graph_from_mask(int n, uint64_t mask);

// Minimum edge mask over all agent relabelings; two graphs are isomorphic
// exactly when their canonical forms agree. The sweep is n!, so n <= 7.
uint64_t canonical_form(const GossipGraph& g);

// Every initial graph on n agents in mask order (n <= 7). With mod_iso only
// the canonical representative of each isomorphism class is visited.
void enumerate_initial_graphs(int n, bool mod_iso,
                              const std::function<void(const GossipGraph&)>& visit);
std::vector<GossipGraph> enumerate_initial_graphs(int n, bool mod_iso);

// The worked examples that recur throughout: line3, bush3, doublebush5,
// pentagon, tree6, sun-fig1-a, sun-fig1-b, and completeN for N in 2..64.
GossipGraph builtin_graph(const std::string& name);

// A graph where the structural characterization and the search verdict
// disagree; either side may be the wrong one, so both verdicts are kept.
struct Counterexample {
    GossipGraph graph;
    bool predicate;
    bool search;
};

struct VerificationReport {
    std::string theorem;
    int n = 0;
    uint64_t graphs_checked = 0;
    std::vector<Counterexample> counterexamples;
    std::chrono::milliseconds elapsed{0};
    bool mod_iso = false;

    bool confirmed() const { return counterexamples.empty(); }
};

struct VerifyOptions {
    bool mod_iso = false;
    int jobs = 1;                  // graphs are split over mask ranges
    int runs = 200;                // per graph, for the -fair-empirical ids
    std::size_t cap = 100'000;     // calls per run before giving up
    uint64_t seed = 0x44394E3630353531ull;
    std::size_t hierarchy_max_len = 4;
};

// co-strong, wco-strong, lns-strong, lns-weak, any-fair-empirical,
// tok-fair-empirical, spi-fair-empirical, hierarchy.
std::vector<std::string> theorem_ids();

// Sweeps every n-agent initial graph and compares the structural predicate
// against the search verdict; the report is deterministic for fixed options,
// whatever the job count. id "hierarchy" forwards to check_hierarchy with
// opt.hierarchy_max_len.
VerificationReport check_theorem(const std::string& id, int n, const VerifyOptions& opt = {});

// On every n-agent graph, walks all call sequences up to max_len and checks
// the per-call refinement chain LNS => CO => wCO => ANY plus the emptiness of
// (not LNS) and SPI and TOK; also re-checks the known placements of five
// short sequences on the three-agent line.
VerificationReport check_hierarchy(int n, std::size_t max_len, const VerifyOptions& opt = {});

std::string report_json(const VerificationReport& r);

} // namespace gossip
