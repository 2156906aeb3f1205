#pragma once

#include <optional>
#include <vector>

#include "gossip/condition.hpp"
#include "gossip/core.hpp"

namespace gossip {

enum class LastDir : uint8_t { None, Out, In };

// Run state carrying exactly the memory the protocol condition can observe.
// Components the signature does not demand are left at their initial values
// (callers should not read them). The optional trace is for reporting only
// and never feeds evaluation.
struct ExecutionState {
    GossipGraph graph;
    std::vector<LastDir> last_direction;
    Relation made_calls; // ordered pairs (caller, callee) of past calls
    MemorySignature sig;
    std::optional<CallSequence> trace;

    bool secret(AgentId x, AgentId y) const { return graph.S.contains(x, y); }
    bool made(AgentId x, AgentId y) const { return made_calls.contains(x, y); }
    LastDir last(AgentId x) const { return last_direction[size_t(x)]; }

    bool operator==(const ExecutionState& o) const {
        return graph == o.graph && last_direction == o.last_direction &&
               made_calls == o.made_calls;
    }
};

ExecutionState make_state(const GossipGraph& g, const ConditionExpr& cond,
                          bool keep_trace = false);

// Truth of a condition for a prospective call from x to y, on anything that
// exposes x's view: secret(x,y), made(x,y), and last(x).
template <typename View>
bool eval_condition(const ConditionExpr& e, const View& v, AgentId x, AgentId y) {
    switch (e.kind) {
    case CondKind::True: return true;
    case CondKind::KnowsSecret: return v.secret(x, y);
    case CondKind::Called: return v.made(x, y);
    case CondKind::WasCalledBy: return v.made(y, x);
    case CondKind::Fresh: return v.last(x) == LastDir::None;
    case CondKind::LastOut: return v.last(x) == LastDir::Out;
    case CondKind::LastIn: return v.last(x) == LastDir::In;
    case CondKind::Not: return !eval_condition(*e.lhs, v, x, y);
    case CondKind::And:
        return eval_condition(*e.lhs, v, x, y) && eval_condition(*e.rhs, v, x, y);
    case CondKind::Or:
        return eval_condition(*e.lhs, v, x, y) || eval_condition(*e.rhs, v, x, y);
    }
    return false; // unreachable
}

// All calls that may be placed now: caller holds callee's number, not a
// self-call, not everyone is an expert yet, and the condition holds.
// Ordered by (caller, callee).
std::vector<Call> permitted_calls(const ExecutionState& st, const ConditionExpr& cond);

// Graph merge plus memory upkeep, no permission check. step() is the
// checked variant and is what protocol runs should use.
ExecutionState advance_state(const ExecutionState& st, Call c);

// Throws std::invalid_argument naming the violated conjunct: possibility,
// the everyone-is-an-expert stop condition, or the protocol condition.
ExecutionState step(const ExecutionState& st, Call c, const ConditionExpr& cond);

struct ValidationReport {
    bool permitted = false;
    std::optional<int> failing_index; // 1-based position of the first bad call
    bool successful = false;          // permitted and everyone ends an expert
    bool stuck = false;               // permitted, not successful, no way on
};

ValidationReport validate_sequence(const GossipGraph& g, const CallSequence& seq,
                                   const ConditionExpr& cond);

} // namespace gossip
