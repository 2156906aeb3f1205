#include "gossip/textio.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace gossip {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_name(std::string_view s) {
    if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    });
}

std::vector<std::string_view> split_words(std::string_view s) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

} // namespace

std::optional<AgentId> NamedGraph::agent(std::string_view name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<AgentId>(i);
    return std::nullopt;
}

NamedGraph parse_graph_file(const std::string& text) {
    struct Line {
        int number;
        std::string name;
        std::vector<std::string> successors;
    };
    std::vector<Line> lines;

    std::istringstream in(text);
    std::string raw;
    for (int number = 1; std::getline(in, raw); ++number) {
        std::string_view body = raw;
        if (size_t hash = body.find('#'); hash != std::string_view::npos)
            body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;

        size_t colon = body.find(':');
        if (colon == std::string_view::npos)
            throw TextParseError(number, "expected `name: successors...`, got no `:`");
        std::string_view name = trim(body.substr(0, colon));
        if (!valid_name(name))
            throw TextParseError(number, "bad agent name '" + std::string(name) +
                                             "' (names match [a-z][a-z0-9]*)");
        for (const Line& seen : lines)
            if (seen.name == name)
                throw TextParseError(number, "agent '" + std::string(name) +
                                                 "' already declared on line " +
                                                 std::to_string(seen.number));

        Line line{number, std::string(name), {}};
        for (std::string_view succ : split_words(body.substr(colon + 1))) {
            if (!valid_name(succ))
                throw TextParseError(number, "bad agent name '" + std::string(succ) +
                                                 "' (names match [a-z][a-z0-9]*)");
            line.successors.emplace_back(succ);
        }
        lines.push_back(std::move(line));
    }
    if (lines.empty()) throw TextParseError(0, "no agents declared");

    NamedGraph out;
    for (const Line& line : lines) out.names.push_back(line.name);

    std::vector<std::pair<AgentId, AgentId>> edges;
    for (const Line& line : lines) {
        AgentId from = *out.agent(line.name);
        for (const std::string& succ : line.successors) {
            std::optional<AgentId> to = out.agent(succ);
            if (!to)
                throw TextParseError(line.number, "agent '" + succ + "' is never declared");
            if (*to != from) edges.emplace_back(from, *to);
        }
    }
    out.graph = make_initial(static_cast<int>(out.names.size()), edges);
    return out;
}

std::string format_graph_file(const NamedGraph& g) {
    std::string out;
    for (AgentId x = 0; x < g.graph.n; ++x) {
        out += g.names[x];
        out += ':';
        for (AgentId y = 0; y < g.graph.n; ++y)
            if (y != x && g.graph.N.contains(x, y)) {
                out += ' ';
                out += g.names[y];
            }
        out += '\n';
    }
    return out;
}

NamedGraph with_default_names(const GossipGraph& g) {
    NamedGraph out{g, {}};
    for (AgentId x = 0; x < g.n; ++x) out.names.push_back(agent_name(x));
    return out;
}

namespace {

AgentId resolve_agent(const NamedGraph& g, std::string_view name, size_t position) {
    std::optional<AgentId> id = g.agent(name);
    if (!id)
        throw TextParseError(0, "unknown agent '" + std::string(name) + "' in call " +
                                    std::to_string(position));
    return *id;
}

} // namespace

CallSequence parse_sequence(const std::string& text, const NamedGraph& g) {
    bool single_letters = std::all_of(g.names.begin(), g.names.end(),
                                      [](const std::string& s) { return s.size() == 1; });
    CallSequence out;
    std::string_view rest = text;
    if (trim(rest).empty()) return out;
    for (size_t position = 1; true; ++position) {
        size_t semi = rest.find(';');
        std::string_view token = trim(rest.substr(0, semi));
        if (token.empty())
            throw TextParseError(0, "empty call " + std::to_string(position));

        AgentId caller, callee;
        if (size_t gt = token.find('>'); gt != std::string_view::npos) {
            caller = resolve_agent(g, trim(token.substr(0, gt)), position);
            callee = resolve_agent(g, trim(token.substr(gt + 1)), position);
        } else if (single_letters && token.size() == 2) {
            caller = resolve_agent(g, token.substr(0, 1), position);
            callee = resolve_agent(g, token.substr(1, 1), position);
        } else {
            throw TextParseError(0, "call " + std::to_string(position) + " '" +
                                        std::string(token) +
                                        "' is neither `xy` shorthand nor `x>y`");
        }
        if (caller == callee)
            throw TextParseError(0, "call " + std::to_string(position) + " '" +
                                        std::string(token) + "' is a self-call");
        out.emplace_back(caller, callee);

        if (semi == std::string_view::npos) break;
        rest.remove_prefix(semi + 1);
    }
    return out;
}

std::string format_sequence(const CallSequence& seq, const NamedGraph& g) {
    bool single_letters = std::all_of(g.names.begin(), g.names.end(),
                                      [](const std::string& s) { return s.size() == 1; });
    std::string out;
    for (const Call& c : seq) {
        if (!out.empty()) out += ';';
        out += g.names[c.caller];
        if (!single_letters) out += '>';
        out += g.names[c.callee];
    }
    return out;
}

std::string export_dot(const NamedGraph& g) {
    std::string out = "digraph gossip {\n";
    for (const std::string& name : g.names) out += "  \"" + name + "\";\n";
    const Relation& N = g.graph.N;
    const Relation& S = g.graph.S;
    auto edge = [&](AgentId x, AgentId y, bool solid, bool both) {
        out += "  \"" + g.names[x] + "\" -> \"" + g.names[y] + "\"";
        if (solid && both) out += " [dir=both]";
        else if (!solid && both) out += " [dir=both, style=dashed]";
        else if (!solid) out += " [style=dashed]";
        out += ";\n";
    };
    for (AgentId x = 0; x < g.graph.n; ++x)
        for (AgentId y = x + 1; y < g.graph.n; ++y) {
            bool sxy = S.contains(x, y), syx = S.contains(y, x);
            bool nxy = N.contains(x, y), nyx = N.contains(y, x);
            if (sxy && syx) {
                edge(x, y, true, true);
            } else if (nxy && nyx && !sxy && !syx) {
                edge(x, y, false, true);
            } else {
                if (nxy) edge(x, y, sxy, false);
                if (nyx) edge(y, x, syx, false);
            }
        }
    out += "}\n";
    return out;
}

} // namespace gossip
