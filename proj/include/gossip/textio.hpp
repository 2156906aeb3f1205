#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gossip/core.hpp"

namespace gossip {

// A gossip graph together with the agent names it was declared with. Agent
// indices follow declaration order in the source text.
struct NamedGraph {
    GossipGraph graph;
    std::vector<std::string> names;

    std::optional<AgentId> agent(std::string_view name) const;
};

// Raised by the text readers; line is 1-based, 0 when the input has no line
// structure (sequence literals).
struct TextParseError : std::runtime_error {
    int line;
    TextParseError(int l, const std::string& what) : std::runtime_error(what), line(l) {}
};

// Graph files describe initial graphs only: one line per agent,
//
//     name: successor successor ...
//
// listing the other agents whose number the agent starts with (knowing your
// own number is implicit). Names match [a-z][a-z0-9]*; `#` starts a comment;
// blank lines are skipped; every successor must be declared on a line of its
// own, possibly with an empty successor list.
NamedGraph parse_graph_file(const std::string& text);
std::string format_graph_file(const NamedGraph& g);

// Attaches the default names a, b, c, ... to an anonymous graph.
NamedGraph with_default_names(const GossipGraph& g);

// Call sequences: `ab;cd` when every agent name is a single letter, or the
// explicit `a>b;c>d` form. Whitespace around tokens is ignored; the empty
// string is the empty sequence.
CallSequence parse_sequence(const std::string& text, const NamedGraph& g);
std::string format_sequence(const CallSequence& seq, const NamedGraph& g);

// GraphViz rendering in the usual gossip style: number-only edges dashed,
// secret edges solid, mutual pairs of the same style collapsed into one
// double-headed edge, self-loops omitted.
std::string export_dot(const NamedGraph& g);

} // namespace gossip
