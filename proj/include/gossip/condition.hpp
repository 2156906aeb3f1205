#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gossip {

// A protocol condition is a boolean formula evaluated for a prospective call
// from x to y. Atoms speak about x's view: its secret row, its own call
// history, and the direction of the last call it took part in.
enum class CondKind {
    True,
    KnowsSecret, // x already holds y's secret
    Called,      // x called y earlier
    WasCalledBy, // y called x earlier
    Fresh,       // x has not been in any call yet
    LastOut,     // x's latest call was one it placed
    LastIn,      // x's latest call was one it received
    Not,
    And,
    Or,
};

struct ConditionExpr;
using ConditionPtr = std::shared_ptr<const ConditionExpr>;

struct ConditionExpr {
    CondKind kind;
    ConditionPtr lhs; // Not: operand; And/Or: left
    ConditionPtr rhs; // And/Or: right
};

ConditionPtr cond_atom(CondKind kind);
ConditionPtr cond_not(ConditionPtr a);
ConditionPtr cond_and(ConditionPtr a, ConditionPtr b);
ConditionPtr cond_or(ConditionPtr a, ConditionPtr b);

bool structurally_equal(const ConditionExpr& a, const ConditionExpr& b);

// Which pieces of run memory the atoms of a condition actually consult.
// Lets execution states carry only what the condition can observe.
struct MemorySignature {
    bool needs_secret_relation = false;
    bool needs_call_set = false;
    bool needs_last_direction = false;
};

MemorySignature signature_of(const ConditionExpr& e);

class ConditionParseError : public std::runtime_error {
  public:
    ConditionParseError(std::size_t offset, std::vector<std::string> expected);
    std::size_t offset;                // byte position in the input
    std::vector<std::string> expected; // tokens that would have been accepted
};

// Grammar (case-insensitive):
//   or   := and ('or' and)*
//   and  := not ('and' not)*
//   not  := 'not' not | primary
//   primary := atom | '(' or ')'
//   atom := 'true' | 'knows-secret' | 'called' | 'was-called-by'
//         | 'fresh' | 'last-out' | 'last-in'
ConditionPtr parse_condition(std::string_view text);

// Canonical lowercase rendering with minimal parentheses; parsing it back
// yields a structurally equal tree.
std::string format_condition(const ConditionExpr& e);

// any | tok | spi | co | wco | lns (case-insensitive). Throws on other ids.
ConditionPtr named_protocol(std::string_view id);

} // namespace gossip
