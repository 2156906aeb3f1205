#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "gossip/classify.hpp"
#include "gossip/explore.hpp"

using namespace gossip;

namespace {

GossipGraph line3() { return make_initial(3, {{0, 1}, {1, 2}}); }
GossipGraph bush3() { return make_initial(3, {{0, 1}, {2, 1}}); }

GossipGraph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y) e.push_back({x, y});
    return make_initial(n, e);
}

GossipGraph pentagon() {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 5; ++i) {
        e.push_back({i, (i + 1) % 5});
        e.push_back({(i + 1) % 5, i});
    }
    return make_initial(5, e);
}

GossipGraph mask_graph(int n, uint64_t mask) {
    std::vector<std::pair<int, int>> e;
    int k = 0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            if (mask & (uint64_t{1} << k)) e.push_back({x, y});
            ++k;
        }
    return make_initial(n, e);
}

CallSequence calls(std::initializer_list<std::pair<int, int>> ps) {
    CallSequence s;
    for (auto [x, y] : ps) s.push_back(Call(x, y));
    return s;
}

// Independent shortest-success oracle: plain recursion over raw graphs and
// possible calls, no engine, no state dedup.
int brute_min_any(const GossipGraph& g, int depth_cap) {
    if (all_experts(g)) return 0;
    if (depth_cap == 0) return -1;
    int best = -1;
    for (int x = 0; x < g.n; ++x)
        for (int y = 0; y < g.n; ++y) {
            if (x == y || !g.N.contains(x, y)) continue;
            int sub = brute_min_any(apply_call(g, Call(x, y)), depth_cap - 1);
            if (sub >= 0 && (best < 0 || sub + 1 < best)) best = sub + 1;
        }
    return best;
}

GossipGraph permuted(const GossipGraph& g, const std::vector<int>& p) {
    std::vector<std::pair<int, int>> e;
    for (int x = 0; x < g.n; ++x)
        for (int y = 0; y < g.n; ++y)
            if (x != y && g.N.contains(x, y)) e.push_back({p[x], p[y]});
    return make_initial(g.n, e);
}

GossipGraph random_tree(int n, std::mt19937_64& rng) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) e.push_back({order[i], order[rng() % i]});
    return make_initial(n, e);
}

// Replays seq and checks the abstract state comes back to where the stem
// left it — the certificate that the run can loop forever.
void check_infinite_witness(const GossipGraph& g, const ConditionExpr& cond,
                            const InfiniteWitness& w) {
    CHECK_FALSE(w.cycle.empty());
    CallSequence whole = w.stem;
    whole.insert(whole.end(), w.cycle.begin(), w.cycle.end());
    ValidationReport rep = validate_sequence(g, whole, cond);
    CHECK(rep.permitted);
    ExecutionState at_stem = make_state(g, cond);
    for (const Call& c : w.stem) at_stem = advance_state(at_stem, c);
    ExecutionState around = at_stem;
    for (const Call& c : w.cycle) around = advance_state(around, c);
    CHECK(at_stem == around);
}

} // namespace

TEST_CASE("decide_success: the classic small cases") {
    ConditionPtr lns = named_protocol("lns");
    ConditionPtr any = named_protocol("any");
    ConditionPtr co = named_protocol("co");

    CHECK(decide_success(complete(3), *lns).verdict == SuccessVerdict::strongly_successful);
    CHECK(decide_success(complete(4), *lns).verdict == SuccessVerdict::strongly_successful);

    SearchResult l3 = decide_success(line3(), *lns);
    CHECK(l3.verdict == SuccessVerdict::weakly_successful_only);
    REQUIRE(l3.witness.has_value());
    CHECK(validate_sequence(line3(), *l3.witness, *lns).successful);
    REQUIRE(l3.stuck_witness.has_value());
    CHECK(*l3.stuck_witness == calls({{1, 2}, {0, 1}}));
    CHECK_FALSE(l3.infinite_witness.has_value());
    // the two quoted runs hold as stated even though the search's own
    // successful witness picks ac before bc
    CHECK(validate_sequence(line3(), calls({{0, 1}, {1, 2}, {0, 2}}), *lns).successful);
    CHECK(validate_sequence(line3(), calls({{1, 2}, {0, 1}}), *lns).stuck);

    SearchResult l3any = decide_success(line3(), *any);
    CHECK(l3any.verdict == SuccessVerdict::weakly_successful_only);
    REQUIRE(l3any.infinite_witness.has_value());
    CHECK(l3any.infinite_witness->cycle == calls({{0, 1}}));
    check_infinite_witness(line3(), *any, *l3any.infinite_witness);

    SearchResult bush = decide_success(bush3(), *lns);
    CHECK(bush.verdict == SuccessVerdict::unsuccessful);
    CHECK_FALSE(bush.witness.has_value());
    REQUIRE(bush.stuck_witness.has_value());
    CHECK(validate_sequence(bush3(), *bush.stuck_witness, *lns).stuck);

    CHECK(decide_success(line3(), *co).verdict == SuccessVerdict::strongly_successful);

    // one agent is born an expert
    SearchResult solo = decide_success(make_initial(1, {}), *any);
    CHECK(solo.verdict == SuccessVerdict::strongly_successful);
    CHECK(solo.witness == CallSequence{});
}

TEST_CASE("witnesses are valid runs, search is deterministic") {
    std::mt19937_64 rng(13579);
    // direction memory (tok/spi) and plain possibility (any) blow up the
    // state space fast; keep those to sizes that explore in milliseconds
    const std::pair<const char*, int> populations[] = {
        {"lns", 6}, {"co", 4}, {"wco", 4}, {"any", 5}, {"tok", 4}, {"spi", 4}};
    for (int iter = 0; iter < 250; ++iter) {
        auto [id, max_n] = populations[rng() % 6];
        int n = 2 + int(rng() % (max_n - 1));
        GossipGraph g = mask_graph(n, rng());
        ConditionPtr cond = named_protocol(id);

        SearchResult r = decide_success(g, *cond);
        CHECK(r.states_visited > 0);
        if (r.witness) {
            ValidationReport rep = validate_sequence(g, *r.witness, *cond);
            CHECK(rep.permitted);
            CHECK(rep.successful);
        } else {
            CHECK(r.verdict == SuccessVerdict::unsuccessful);
        }
        if (r.stuck_witness) {
            ValidationReport rep = validate_sequence(g, *r.stuck_witness, *cond);
            CHECK(rep.permitted);
            CHECK(rep.stuck);
        }
        if (r.infinite_witness) check_infinite_witness(g, *cond, *r.infinite_witness);
        if (r.verdict == SuccessVerdict::strongly_successful) {
            CHECK_FALSE(r.stuck_witness.has_value());
            CHECK_FALSE(r.infinite_witness.has_value());
        }

        SearchResult again = decide_success(g, *cond);
        CHECK(again.verdict == r.verdict);
        CHECK(again.witness == r.witness);
        CHECK(again.stuck_witness == r.stuck_witness);
        CHECK(again.states_visited == r.states_visited);
    }
}

TEST_CASE("verdicts and minimum lengths are isomorphism-invariant") {
    std::mt19937_64 rng(8642);
    const char* ids[] = {"any", "tok", "spi", "co", "wco", "lns"};
    for (int iter = 0; iter < 150; ++iter) {
        int n = 2 + int(rng() % 3);
        GossipGraph g = mask_graph(n, rng());
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        std::shuffle(p.begin(), p.end(), rng);
        GossipGraph h = permuted(g, p);
        ConditionPtr cond = named_protocol(ids[rng() % 6]);

        SearchResult rg = decide_success(g, *cond);
        SearchResult rh = decide_success(h, *cond);
        CHECK(rg.verdict == rh.verdict);
        CHECK(rg.states_visited == rh.states_visited);
        CHECK(min_success_length(g, *cond) == min_success_length(h, *cond));
    }
}

TEST_CASE("min_success_length: known values and the brute-force oracle") {
    ConditionPtr any = named_protocol("any");
    ConditionPtr lns = named_protocol("lns");

    CHECK(min_success_length(complete(4), *any) == 4);
    CHECK(min_success_length(complete(5), *any) == 6);
    CHECK(min_success_length(pentagon(), *any) == 6);

    CHECK(min_success_length(line3(), *any) == brute_min_any(line3(), 5));
    CHECK(min_success_length(line3(), *any) == 3);
    CHECK(min_success_length(line3(), *lns) == 3);
    CHECK_FALSE(min_success_length(bush3(), *lns).has_value());
    CHECK(min_success_length(make_initial(1, {}), *any) == 0);

    // the oracle agrees on every 3-agent graph
    for (uint64_t mask = 0; mask < 64; ++mask) {
        GossipGraph g = mask_graph(3, mask);
        std::optional<int> fast = min_success_length(g, *any);
        int slow = brute_min_any(g, 5);
        CHECK(fast.value_or(-1) == slow);
    }
}

TEST_CASE("enumerate_extension") {
    ConditionPtr lns = named_protocol("lns");
    ConditionPtr any = named_protocol("any");

    // the whole tree for the bush: two maximal runs, mirror images
    std::vector<ExtensionEntry> bush = enumerate_extension(bush3(), *lns, std::nullopt);
    std::vector<CallSequence> maximal;
    for (const ExtensionEntry& e : bush)
        if (e.maximal) maximal.push_back(e.sequence);
    CHECK(maximal == std::vector<CallSequence>{calls({{0, 1}, {2, 1}}), calls({{2, 1}, {0, 1}})});
    CHECK(bush.size() == 5); // e, ab, ab;cb, cb, cb;ab
    CHECK(bush.front().sequence.empty());

    std::vector<ExtensionEntry> l3 = enumerate_extension(line3(), *lns, std::nullopt);
    auto has = [&l3](const CallSequence& s) {
        return std::any_of(l3.begin(), l3.end(),
                           [&](const ExtensionEntry& e) { return e.sequence == s; });
    };
    CHECK(has(calls({{0, 1}, {1, 2}, {0, 2}})));
    CHECK(has(calls({{1, 2}, {0, 1}})));
    CHECK(l3.size() == 8);

    // length-zero bound: just the empty sequence, flagged by extendability
    std::vector<ExtensionEntry> none = enumerate_extension(line3(), *any, 0);
    CHECK(none.size() == 1);
    CHECK_FALSE(none.front().maximal);

    // unbounded enumeration is refused when runs could go on forever
    CHECK_THROWS_AS(enumerate_extension(line3(), *any, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_extension(line3(), *named_protocol("tok"), std::nullopt),
                    std::invalid_argument);
    CHECK_NOTHROW(enumerate_extension(line3(), *named_protocol("co"), std::nullopt));
    CHECK_NOTHROW(enumerate_extension(line3(), *named_protocol("wco"), std::nullopt));
    CHECK_NOTHROW(enumerate_extension(line3(), *parse_condition("fresh"), std::nullopt));

    // bounded enumeration of an infinite extension is fine
    std::vector<ExtensionEntry> bounded = enumerate_extension(line3(), *any, 2);
    CHECK(bounded.size() > 4);
    for (const ExtensionEntry& e : bounded) CHECK(e.sequence.size() <= 2);
}

TEST_CASE("breadth-first minimum equals the minimum over the finite extension") {
    ConditionPtr lns = named_protocol("lns");
    std::mt19937_64 rng(11711);
    for (int iter = 0; iter < 120; ++iter) {
        int n = 2 + int(rng() % 3);
        GossipGraph g = mask_graph(n, rng());
        std::optional<int> fast = min_success_length(g, *lns);
        std::optional<int> slow;
        for (const ExtensionEntry& e : enumerate_extension(g, *lns, std::nullopt)) {
            if (!e.maximal) continue;
            if (!validate_sequence(g, e.sequence, *lns).successful) continue;
            int len = int(e.sequence.size());
            if (!slow || len < *slow) slow = len;
        }
        CHECK(fast == slow);
    }
}

TEST_CASE("final states of search witnesses satisfy the saturation laws") {
    // at the end of a maximal learn-new-secrets run, the secret relation has
    // caught up with the number relation and is closed under composing with
    // reachability in the *starting* network (the final network can reach
    // further than the final secrets, so its closure would overshoot)
    ConditionPtr lns = named_protocol("lns");
    auto check_final = [&](const GossipGraph& g0, const CallSequence& seq) {
        GossipGraph g = apply_sequence(g0, seq);
        CHECK(g.S == g.N);
        CHECK(g.S.compose(g0.N.closure()) == g.S);
    };
    for (int n = 1; n <= 4; ++n) {
        uint64_t cells = uint64_t{1} << (n * (n - 1));
        uint64_t step = n == 4 ? 7 : 1; // sample n=4, exhaust smaller sizes
        for (uint64_t mask = 0; mask < cells; mask += step) {
            GossipGraph g = mask_graph(n, mask);
            SearchResult r = decide_success(g, *lns);
            if (r.witness) check_final(g, *r.witness);
            if (r.stuck_witness) check_final(g, *r.stuck_witness);
        }
    }
    // and exhaustively over every maximal sequence for n <= 3
    for (uint64_t mask = 0; mask < 64; ++mask) {
        GossipGraph g = mask_graph(3, mask);
        for (const ExtensionEntry& e : enumerate_extension(g, *lns, std::nullopt))
            if (e.maximal) check_final(g, e.sequence);
    }
}

TEST_CASE("bush runs keep each agent at most one secret behind") {
    // walk every learn-new-secrets path on every bush with up to five
    // agents; at every stage an agent's unknown-secret gap is empty exactly
    // when it holds the root's secret, else a single agent on its root path
    ConditionPtr lns = named_protocol("lns");
    int bushes = 0;
    for (int n = 3; n <= 5; ++n) {
        uint64_t cells = uint64_t{1} << (n * (n - 1));
        for (uint64_t mask = 0; mask < cells; ++mask) {
            if (std::popcount(mask) != n - 1) continue; // trees are this sparse
            GossipGraph g = mask_graph(n, mask);
            GraphClass cls = classify(g);
            if (!cls.bush) continue;
            ++bushes;
            int root = *cls.tree_root;
            Relation reach = g.N.closure();
            std::vector<GossipGraph> stack{g};
            while (!stack.empty()) {
                GossipGraph cur = stack.back();
                stack.pop_back();
                for (int x = 0; x < n; ++x) {
                    uint64_t gap = cur.N.row(x) & ~cur.S.row(x);
                    if (cur.S.contains(x, root)) {
                        CHECK(gap == 0);
                    } else {
                        CHECK(std::popcount(gap) == 1);
                        CHECK(reach.contains(x, std::countr_zero(gap)));
                    }
                }
                for (int x = 0; x < n; ++x)
                    for (int y = 0; y < n; ++y)
                        if (x != y && cur.N.contains(x, y) && !cur.S.contains(x, y))
                            stack.push_back(apply_call(cur, Call(x, y)));
            }
        }
    }
    CHECK(bushes > 50); // the sweep found a real population
}

TEST_CASE("random fair runs") {
    ConditionPtr any = named_protocol("any");
    ConditionPtr tok = named_protocol("tok");
    ConditionPtr lns = named_protocol("lns");

    FairRunStats l3 = random_fair_runs(line3(), *any, 1000, 100000, 42);
    CHECK(l3.runs == 1000);
    CHECK(l3.successes == 1000);
    CHECK(l3.capped_runs == 0);
    CHECK(l3.max_calls_observed >= 3);
    CHECK(l3.seed == 42);

    FairRunStats l3tok = random_fair_runs(line3(), *tok, 1000, 100000, 42);
    CHECK(l3tok.successes == 1000);

    // two agents who know each other plus a loner: no run can ever finish,
    // and no run ever stops making calls either
    GossipGraph split = make_initial(3, {{0, 1}, {1, 0}});
    FairRunStats s = random_fair_runs(split, *any, 200, 100000, 7);
    CHECK(s.successes == 0);
    CHECK(s.capped_runs == 200);
    FairRunStats stok = random_fair_runs(split, *tok, 200, 100000, 7);
    CHECK(stok.successes == 0);
    CHECK(stok.capped_runs == 200);

    // no numbers at all: every run is stuck after zero calls
    FairRunStats frozen = random_fair_runs(make_initial(3, {}), *any, 50, 100000, 3);
    CHECK(frozen.successes == 0);
    CHECK(frozen.capped_runs == 0);
    CHECK(frozen.max_calls_observed == 0);

    // learn-new-secrets runs always halt on their own
    FairRunStats bl = random_fair_runs(bush3(), *lns, 500, 100000, 11);
    CHECK(bl.successes == 0);
    CHECK(bl.capped_runs == 0);

    // identical seeds reproduce identical statistics
    FairRunStats a = random_fair_runs(pentagon(), *any, 64, 1000, 99);
    FairRunStats b = random_fair_runs(pentagon(), *any, 64, 1000, 99);
    CHECK(a.successes == b.successes);
    CHECK(a.max_calls_observed == b.max_calls_observed);
    CHECK(a.successes + a.capped_runs <= a.runs);

    CHECK_THROWS_AS(random_fair_runs(line3(), *any, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("bottom-up sequences climb trees level by level") {
    // the six-agent example: b,c under a; d under b; e,f under d
    GossipGraph tree6 = make_initial(6, {{1, 0}, {2, 0}, {3, 1}, {4, 3}, {5, 3}});
    CallSequence seq = bottom_up_sequence(tree6);
    CHECK(seq == calls({{2, 0}, {4, 3}, {5, 3}, {3, 1}, {4, 1}, {5, 1},
                        {1, 0}, {3, 0}, {4, 0}, {5, 0}}));
    ConditionPtr lns = named_protocol("lns");
    ValidationReport rep = validate_sequence(tree6, seq, *lns);
    CHECK(rep.permitted);
    CHECK(rep.stuck); // maximal but not successful: c never hears d,e,f
    GossipGraph after = apply_sequence(tree6, seq);
    CHECK(experts(after) == std::vector<AgentId>{0, 1, 3, 4, 5});
    CHECK(after.S.row(2) == (Relation::bit(0) | Relation::bit(2)));

    CHECK(bottom_up_sequence(make_initial(2, {{0, 1}})) == calls({{0, 1}}));
    CHECK_THROWS_AS(bottom_up_sequence(complete(3)), std::invalid_argument);
    CHECK_THROWS_AS(bottom_up_sequence(make_initial(3, {})), std::invalid_argument);

    std::mt19937_64 rng(369);
    for (int iter = 0; iter < 200; ++iter) {
        GossipGraph t = random_tree(2 + int(rng() % 5), rng);
        CallSequence s = bottom_up_sequence(t);
        ValidationReport r = validate_sequence(t, s, *lns);
        CHECK(r.permitted);
        CHECK((r.successful || r.stuck)); // always maximal
    }
}

TEST_CASE("solve_tree") {
    ConditionPtr lns = named_protocol("lns");

    // trunk a->b->c->d: the root's lone predecessor makes it solvable
    GossipGraph trunk = make_initial(4, {{0, 1}, {1, 2}, {2, 3}});
    TreeSolution ts = solve_tree(trunk);
    CHECK(ts.successful);
    CHECK(validate_sequence(trunk, ts.sequence, *lns).successful);
    CHECK(ts.sequence == calls({{0, 1}, {0, 2}, {1, 2}, {2, 3}, {0, 3}, {1, 3}}));

    TreeSolution two = solve_tree(make_initial(2, {{0, 1}}));
    CHECK(two.successful);
    CHECK(two.sequence == calls({{0, 1}}));

    TreeSolution one = solve_tree(make_initial(1, {}));
    CHECK(one.successful);
    CHECK(one.sequence.empty());

    // bushes only get the bottom-up sequence
    TreeSolution bs = solve_tree(bush3());
    CHECK_FALSE(bs.successful);
    CHECK(bs.sequence == bottom_up_sequence(bush3()));
    CHECK(validate_sequence(bush3(), bs.sequence, *lns).stuck);

    CHECK_THROWS_AS(solve_tree(complete(3)), std::invalid_argument);

    std::mt19937_64 rng(1122);
    for (int iter = 0; iter < 200; ++iter) {
        GossipGraph t = random_tree(2 + int(rng() % 5), rng);
        GraphClass cls = classify(t);
        TreeSolution sol = solve_tree(t);
        ValidationReport r = validate_sequence(t, sol.sequence, *lns);
        CHECK(r.permitted);
        CHECK(sol.successful == r.successful);
        int root_preds = 0;
        for (int x = 0; x < t.n; ++x)
            if (x != *cls.tree_root && t.N.contains(x, *cls.tree_root)) ++root_preds;
        CHECK(sol.successful == (root_preds == 1 || t.n == 1));
    }
}
