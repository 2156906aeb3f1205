#include "gossip/explore.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "gossip/classify.hpp"

namespace gossip {

namespace {

// ---------------------------------------------------------------------------
// Abstract state plumbing. Two interchangeable carriers: a packed 26-byte
// struct for up to eight agents (the hot path: exhaustive verification), and
// the plain ExecutionState beyond that. Both expose the same surface to the
// search templates below.
// ---------------------------------------------------------------------------

struct Packed {
    uint64_t N = 0, S = 0, made = 0; // row of agent x in byte x
    uint16_t last = 0;               // two bits per agent
    bool operator==(const Packed&) const = default;
};

struct PackedHash {
    size_t operator()(const Packed& p) const {
        auto mix = [](uint64_t v) {
            v += 0x9e3779b97f4a7c15ull;
            v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
            v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
            return v ^ (v >> 31);
        };
        return size_t(mix(p.N) ^ mix(p.S + 1) ^ mix(p.made + 2) ^ mix(p.last));
    }
};

struct PackedView {
    const Packed& p;
    bool secret(int x, int y) const { return (p.S >> (8 * x + y)) & 1; }
    bool made(int x, int y) const { return (p.made >> (8 * x + y)) & 1; }
    LastDir last(int x) const { return LastDir((p.last >> (2 * x)) & 3); }
};

bool is_lns_shape(const ConditionExpr& e) {
    return e.kind == CondKind::Not && e.lhs->kind == CondKind::KnowsSecret;
}

class PackedOps {
  public:
    using State = Packed;
    template <typename V> using Map = std::unordered_map<Packed, V, PackedHash>;

    PackedOps(const GossipGraph& g, const ConditionExpr& cond)
        : n_(g.n), cond_(&cond), sig_(signature_of(cond)) {
        for (int x = 0; x < n_; ++x) {
            init_.N |= g.N.row(x) << (8 * x);
            init_.S |= g.S.row(x) << (8 * x);
            full_ |= (Relation::universe(n_)) << (8 * x);
        }
        lns_ = is_lns_shape(cond);
        any_ = cond.kind == CondKind::True;
    }

    const State& initial() const { return init_; }
    const State& key(const State& s) const { return s; }
    bool success(const State& s) const { return s.S == full_; }

    void children(const State& s, std::vector<Call>& out) const {
        out.clear();
        if (s.S == full_) return;
        for (int x = 0; x < n_; ++x) {
            uint64_t cand = ((s.N >> (8 * x)) & 0xff) & ~(uint64_t{1} << x);
            if (lns_) cand &= ~(s.S >> (8 * x)); // skip known secrets wholesale
            for (uint64_t m = cand; m; m &= m - 1) {
                int y = std::countr_zero(m);
                if (lns_ || any_ || eval_condition(*cond_, PackedView{s}, x, y))
                    out.push_back(Call(x, y));
            }
        }
    }

    State apply(const State& s, Call c) const {
        int cx = 8 * c.caller, cy = 8 * c.callee;
        State t = s;
        uint64_t nr = ((s.N >> cx) | (s.N >> cy)) & 0xff;
        uint64_t sr = ((s.S >> cx) | (s.S >> cy)) & 0xff;
        t.N = (t.N & ~(0xffull << cx) & ~(0xffull << cy)) | (nr << cx) | (nr << cy);
        t.S = (t.S & ~(0xffull << cx) & ~(0xffull << cy)) | (sr << cx) | (sr << cy);
        if (sig_.needs_call_set) t.made |= uint64_t{1} << (cx + c.callee);
        if (sig_.needs_last_direction) {
            t.last &= uint16_t(~((3u << (2 * c.caller)) | (3u << (2 * c.callee))));
            t.last |= uint16_t((uint16_t(LastDir::Out) << (2 * c.caller)) |
                               (uint16_t(LastDir::In) << (2 * c.callee)));
        }
        return t;
    }

  private:
    int n_;
    const ConditionExpr* cond_;
    MemorySignature sig_;
    Packed init_;
    uint64_t full_ = 0;
    bool lns_ = false, any_ = false;
};

class GenericOps {
  public:
    using State = ExecutionState;
    template <typename V> using Map = std::map<std::vector<uint64_t>, V>;

    GenericOps(const GossipGraph& g, const ConditionExpr& cond)
        : cond_(&cond), init_(make_state(g, cond)), full_(Relation::full(g.n)) {}

    const State& initial() const { return init_; }

    std::vector<uint64_t> key(const State& s) const {
        std::vector<uint64_t> k;
        int n = s.graph.n;
        k.reserve(size_t(3 * n + 1));
        for (int x = 0; x < n; ++x) k.push_back(s.graph.N.row(x));
        for (int x = 0; x < n; ++x) k.push_back(s.graph.S.row(x));
        for (int x = 0; x < n; ++x) k.push_back(s.made_calls.row(x));
        uint64_t l = 0;
        for (int x = 0; x < n && x < 32; ++x) l |= uint64_t(s.last(x)) << (2 * x);
        k.push_back(l); // 64 agents max; two words would be needed past 32
        for (int x = 32; x < n; ++x) k.push_back(uint64_t(s.last(x)));
        return k;
    }

    bool success(const State& s) const { return s.graph.S == full_; }

    void children(const State& s, std::vector<Call>& out) const {
        out = permitted_calls(s, *cond_);
    }

    State apply(const State& s, Call c) const { return advance_state(s, c); }

  private:
    const ConditionExpr* cond_;
    State init_;
    Relation full_;
};

// ---------------------------------------------------------------------------
// Depth-first decision. Fresh states form a tree; a success or dead end
// anywhere propagates to the root along it, and an edge back into the
// active stack certifies an infinite run, so the three root-level facts
// are exact even though revisited states are not re-expanded.
// ---------------------------------------------------------------------------

struct Mark {
    uint8_t color;  // 1 on stack, 2 finished
    uint32_t depth; // stack depth when first reached (stem length)
};

template <typename Ops>
SearchResult search(const Ops& ops) {
    SearchResult res;
    struct Frame {
        typename Ops::State s;
        std::vector<Call> kids;
        size_t next = 0;
    };
    std::vector<Frame> stack;
    std::vector<Call> path; // call labels along the current stack
    typename Ops::template Map<Mark> marks;

    auto enter = [&](const typename Ops::State& s) {
        ++res.states_visited;
        marks[ops.key(s)] = Mark{1, uint32_t(path.size())};
        Frame f;
        f.s = s;
        ops.children(s, f.kids);
        if (ops.success(s)) {
            if (!res.witness) res.witness = path;
        } else if (f.kids.empty()) {
            if (!res.stuck_witness) res.stuck_witness = path;
        }
        stack.push_back(std::move(f));
    };

    enter(ops.initial());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next == f.kids.size()) {
            marks[ops.key(f.s)].color = 2;
            stack.pop_back();
            if (!path.empty()) path.pop_back();
            continue;
        }
        Call c = f.kids[f.next++];
        typename Ops::State child = ops.apply(f.s, c);
        auto it = marks.find(ops.key(child));
        if (it == marks.end()) {
            path.push_back(c);
            enter(child); // invalidates f
        } else if (it->second.color == 1 && !res.infinite_witness) {
            InfiniteWitness w;
            w.stem.assign(path.begin(), path.begin() + it->second.depth);
            w.cycle.assign(path.begin() + it->second.depth, path.end());
            w.cycle.push_back(c);
            res.infinite_witness = std::move(w);
        }
    }

    if (!res.witness)
        res.verdict = SuccessVerdict::unsuccessful;
    else if (res.stuck_witness || res.infinite_witness)
        res.verdict = SuccessVerdict::weakly_successful_only;
    else
        res.verdict = SuccessVerdict::strongly_successful;
    return res;
}

template <typename Ops>
std::optional<int> shortest_success(const Ops& ops) {
    if (ops.success(ops.initial())) return 0;
    typename Ops::template Map<char> seen;
    std::deque<std::pair<typename Ops::State, int>> queue;
    seen[ops.key(ops.initial())] = 1;
    queue.push_back({ops.initial(), 0});
    std::vector<Call> kids;
    while (!queue.empty()) {
        auto [s, d] = std::move(queue.front());
        queue.pop_front();
        ops.children(s, kids);
        for (Call c : kids) {
            typename Ops::State t = ops.apply(s, c);
            if (ops.success(t)) return d + 1;
            if (seen.emplace(ops.key(t), 1).second) queue.push_back({std::move(t), d + 1});
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Finiteness guard for unbounded extension enumeration.
// ---------------------------------------------------------------------------

// Atom assignments that can actually occur for a prospective call: a fresh
// caller has no history and holds no foreign secret; a non-fresh caller's
// last call went exactly one way; a past call either way already delivered
// the callee's secret.
bool provably_finite(const ConditionExpr& e) {
    struct AtomView {
        bool ks, called, wcb;
        LastDir dir;
        bool secret(int, int) const { return ks; }
        bool made(int a, int) const { return a == 0 ? called : wcb; }
        LastDir last(int) const { return dir; }
    };
    bool never_ks = true, never_called = true;
    for (int v = 0; v < 64; ++v) {
        bool ks = v & 1, called = v & 2, wcb = v & 4, fresh = v & 8, lo = v & 16, li = v & 32;
        if (fresh && (ks || called || wcb || lo || li)) continue;
        if (!fresh && lo == li) continue;
        if ((called || wcb) && !ks) continue;
        AtomView view{ks, called, wcb, lo ? LastDir::Out : (li ? LastDir::In : LastDir::None)};
        if (!eval_condition(e, view, 0, 1)) continue;
        if (ks) never_ks = false;
        if (called) never_called = false;
    }
    // either every permitted call teaches a new secret, or it uses a fresh
    // ordered pair; both can happen only finitely often
    return never_ks || never_called;
}

void enumerate_rec(const ExecutionState& st, const ConditionExpr& cond, CallSequence& seq,
                   std::optional<size_t> max_len, std::vector<ExtensionEntry>& out) {
    std::vector<Call> perms = permitted_calls(st, cond);
    out.push_back({seq, perms.empty()});
    if (max_len && seq.size() >= *max_len) return;
    for (Call c : perms) {
        seq.push_back(c);
        enumerate_rec(advance_state(st, c), cond, seq, max_len, out);
        seq.pop_back();
    }
}

} // namespace

SearchResult decide_success(const GossipGraph& g, const ConditionExpr& cond) {
    if (g.n <= 8) return search(PackedOps(g, cond));
    return search(GenericOps(g, cond));
}

std::optional<int> min_success_length(const GossipGraph& g, const ConditionExpr& cond) {
    if (g.n <= 8) return shortest_success(PackedOps(g, cond));
    return shortest_success(GenericOps(g, cond));
}

std::vector<ExtensionEntry> enumerate_extension(const GossipGraph& g, const ConditionExpr& cond,
                                                std::optional<size_t> max_len) {
    if (!max_len && !provably_finite(cond))
        throw std::invalid_argument(
            "unbounded enumeration needs a condition that can only be satisfied "
            "finitely often; pass a length bound");
    std::vector<ExtensionEntry> out;
    CallSequence seq;
    enumerate_rec(make_state(g, cond), cond, seq, max_len, out);
    return out;
}

namespace {

// True when, from this state onward, the evolving parts of the state are
// exhausted: every configuration the run can still wander through keeps
// some call permitted (no stuck end) and none of those calls changes the
// graph or the call set. The run then provably never terminates.
bool regime_capped(const ExecutionState& s0, const ConditionExpr& cond) {
    std::set<std::vector<LastDir>> seen{s0.last_direction};
    std::vector<ExecutionState> frontier{s0};
    while (!frontier.empty()) {
        ExecutionState s = std::move(frontier.back());
        frontier.pop_back();
        std::vector<Call> perms = permitted_calls(s, cond);
        if (perms.empty()) return false; // a dead end is reachable
        for (Call c : perms) {
            ExecutionState t = advance_state(s, c);
            if (!(t.graph == s.graph) || !(t.made_calls == s.made_calls))
                return false; // the monotone part can still grow
            if (seen.insert(t.last_direction).second) frontier.push_back(std::move(t));
        }
    }
    return true;
}

} // namespace

FairRunStats random_fair_runs(const GossipGraph& g, const ConditionExpr& cond, uint64_t runs,
                              uint64_t cap, uint64_t seed) {
    if (cap < 1) throw std::invalid_argument("cap must be at least 1");
    FairRunStats stats;
    stats.runs = runs;
    stats.seed = seed;
    std::mt19937_64 rng(seed);
    auto pick = [&rng](size_t size) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % uint64_t(size);
        uint64_t r;
        do r = rng();
        while (r >= limit);
        return size_t(r % size);
    };

    Relation full = Relation::full(g.n);
    for (uint64_t run = 0; run < runs; ++run) {
        ExecutionState st = make_state(g, cond);
        uint64_t calls = 0;
        // one analysis per stretch with frozen graph/call-set ("epoch")
        std::map<std::vector<LastDir>, bool> epoch;
        while (true) {
            if (st.graph.S == full) {
                ++stats.successes;
                break;
            }
            std::vector<Call> perms = permitted_calls(st, cond);
            if (perms.empty()) break; // stuck: neither success nor capped
            if (calls >= cap) {
                ++stats.capped_runs;
                break;
            }
            Call c = perms[pick(perms.size())];
            ExecutionState next = advance_state(st, c);
            if (next.graph == st.graph && next.made_calls == st.made_calls) {
                auto [it, fresh] = epoch.try_emplace(st.last_direction, false);
                if (fresh) it->second = regime_capped(st, cond);
                if (it->second) {
                    ++stats.capped_runs;
                    break;
                }
            } else {
                epoch.clear();
            }
            st = std::move(next);
            ++calls;
        }
        stats.max_calls_observed = std::max(stats.max_calls_observed, calls);
    }
    return stats;
}

namespace {

// Shared by bottom_up_sequence and solve_tree: run the level construction
// over the agents in `active`, mutating st. Leaves are taken from the
// initial number relation n0.
CallSequence bottom_up_active(ExecutionState& st, const Relation& n0, uint64_t active,
                              const ConditionExpr& lns) {
    int n = st.graph.n;
    uint64_t frontier = 0; // B(k): agents allowed to place calls
    for (int x = 0; x < n; ++x) {
        if (!(active & Relation::bit(x))) continue;
        bool has_in = false;
        for (int z = 0; z < n; ++z)
            if (z != x && (active & Relation::bit(z)) && n0.contains(z, x)) has_in = true;
        if (!has_in) frontier |= Relation::bit(x);
    }

    CallSequence seq;
    while (true) {
        uint64_t targets = 0; // B'(k): known numbers with unknown secrets
        for (int b = 0; b < n; ++b)
            if (frontier & Relation::bit(b))
                targets |= st.graph.N.row(b) & ~st.graph.S.row(b) & active;
        if (!targets) break;
        // a maximal learn-new-secrets burst from B(k) into B'(k)
        bool progress = true;
        while (progress) {
            progress = false;
            for (int x = 0; x < n && !progress; ++x) {
                if (!(frontier & Relation::bit(x))) continue;
                uint64_t cand = st.graph.N.row(x) & ~st.graph.S.row(x) & targets;
                if (!cand) continue;
                Call c(x, std::countr_zero(cand));
                st = advance_state(st, c);
                seq.push_back(c);
                progress = true;
            }
        }
        frontier |= targets;
    }
    return seq;
}

} // namespace

CallSequence bottom_up_sequence(const GossipGraph& g) {
    if (!classify(g).tree)
        throw std::invalid_argument("bottom-up sequences are defined on trees only");
    ConditionPtr lns = named_protocol("lns");
    ExecutionState st = make_state(g, *lns);
    return bottom_up_active(st, g.N, Relation::universe(g.n), *lns);
}

TreeSolution solve_tree(const GossipGraph& g) {
    GraphClass cls = classify(g);
    if (!cls.tree) throw std::invalid_argument("solve_tree requires a tree");
    AgentId root = *cls.tree_root;

    std::vector<AgentId> preds;
    for (AgentId x = 0; x < g.n; ++x)
        if (x != root && g.N.contains(x, root)) preds.push_back(x);

    ConditionPtr lns = named_protocol("lns");
    ExecutionState st = make_state(g, *lns);
    TreeSolution sol;

    if (preds.size() == 1) {
        // solve everything below the root, bridge across the lone edge into
        // the root, then let the rest phone the now-expert root one by one
        AgentId bridge = preds[0];
        sol.sequence = bottom_up_active(st, g.N, Relation::universe(g.n) & ~Relation::bit(root),
                                        *lns);
        st = advance_state(st, Call(bridge, root));
        sol.sequence.push_back(Call(bridge, root));
        for (AgentId x = 0; x < g.n; ++x) {
            if (x == root || x == bridge) continue;
            st = advance_state(st, Call(x, root));
            sol.sequence.push_back(Call(x, root));
        }
    } else {
        sol.sequence = bottom_up_active(st, g.N, Relation::universe(g.n), *lns);
    }
    sol.successful = all_experts(st.graph);
    return sol;
}

} // namespace gossip
