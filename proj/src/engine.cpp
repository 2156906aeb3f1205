#include "gossip/engine.hpp"

namespace gossip {

ExecutionState make_state(const GossipGraph& g, const ConditionExpr& cond, bool keep_trace) {
    ExecutionState st;
    st.graph = g;
    st.last_direction.assign(size_t(g.n), LastDir::None);
    st.made_calls = Relation(g.n);
    st.sig = signature_of(cond);
    if (keep_trace) st.trace = CallSequence{};
    return st;
}

std::vector<Call> permitted_calls(const ExecutionState& st, const ConditionExpr& cond) {
    std::vector<Call> out;
    if (st.graph.S == Relation::full(st.graph.n)) return out;
    for (AgentId x = 0; x < st.graph.n; ++x)
        for (AgentId y = 0; y < st.graph.n; ++y) {
            if (x == y || !st.graph.N.contains(x, y)) continue;
            if (eval_condition(cond, st, x, y)) out.push_back(Call(x, y));
        }
    return out;
}

ExecutionState advance_state(const ExecutionState& st, Call c) {
    ExecutionState next = st;
    next.graph = apply_call(st.graph, c);
    if (st.sig.needs_last_direction) {
        next.last_direction[size_t(c.caller)] = LastDir::Out;
        next.last_direction[size_t(c.callee)] = LastDir::In;
    }
    if (st.sig.needs_call_set) next.made_calls.add(c.caller, c.callee);
    if (next.trace) next.trace->push_back(c);
    return next;
}

ExecutionState step(const ExecutionState& st, Call c, const ConditionExpr& cond) {
    if (!is_possible(st.graph, c))
        throw std::invalid_argument("call " + agent_name(c.caller) + agent_name(c.callee) +
                                    " is not possible (caller lacks the callee's number)");
    if (st.graph.S == Relation::full(st.graph.n))
        throw std::invalid_argument("no call is permitted: every agent is already an expert");
    if (!eval_condition(cond, st, c.caller, c.callee))
        throw std::invalid_argument("protocol condition rejects call " +
                                    agent_name(c.caller) + agent_name(c.callee));
    return advance_state(st, c);
}

ValidationReport validate_sequence(const GossipGraph& g, const CallSequence& seq,
                                   const ConditionExpr& cond) {
    ValidationReport rep;
    ExecutionState st = make_state(g, cond);
    for (size_t i = 0; i < seq.size(); ++i) {
        const Call& c = seq[i];
        bool ok = is_possible(st.graph, c) && !(st.graph.S == Relation::full(g.n)) &&
                  eval_condition(cond, st, c.caller, c.callee);
        if (!ok) {
            rep.failing_index = int(i) + 1;
            return rep;
        }
        st = advance_state(st, c);
    }
    rep.permitted = true;
    rep.successful = st.graph.S == Relation::full(g.n);
    rep.stuck = !rep.successful && permitted_calls(st, cond).empty();
    return rep;
}

} // namespace gossip
