#include "gossip/cli.hpp"

#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gossip/classify.hpp"
#include "gossip/explore.hpp"
#include "gossip/textio.hpp"
#include "gossip/verify.hpp"

namespace gossip {

namespace {

NamedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TextParseError(0, path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_graph_file(buf.str());
    } catch (const TextParseError& e) {
        throw TextParseError(e.line, path + ": " + e.what());
    }
}

ConditionPtr pick_condition(const std::string& protocol, const std::string& condition) {
    if (!condition.empty()) return parse_condition(condition);
    return named_protocol(protocol);
}

std::string display(const CallSequence& seq, const NamedGraph& g) {
    return seq.empty() ? std::string("(empty)") : format_sequence(seq, g);
}

nlohmann::ordered_json classify_json(const NamedGraph& g) {
    GraphClass c = classify(g.graph);
    nlohmann::ordered_json j;
    j["weakly_connected"] = c.weakly_connected;
    j["strongly_connected"] = c.strongly_connected;
    j["complete"] = c.complete;
    j["terminals"] = nlohmann::ordered_json::array();
    for (AgentId t : c.terminals) j["terminals"].push_back(g.names[size_t(t)]);
    j["sun"] = c.sun;
    j["tree"] = c.tree;
    j["tree_root"] = c.tree_root ? nlohmann::ordered_json(g.names[size_t(*c.tree_root)])
                                 : nlohmann::ordered_json(nullptr);
    j["bush"] = c.bush;
    j["double_bush"] = c.double_bush;
    if (c.double_bush_witness) {
        const auto& [mid, left, right] = *c.double_bush_witness;
        j["double_bush_witness"] = {g.names[size_t(mid)], g.names[size_t(left)],
                                    g.names[size_t(right)]};
    } else {
        j["double_bush_witness"] = nullptr;
    }
    j["component_count"] = c.component_count;
    j["scc_count"] = c.scc_count;
    return j;
}

int do_run(const NamedGraph& g, const ConditionExpr& cond, uint64_t seed, uint64_t cap,
           std::ostream& out) {
    std::mt19937_64 rng(seed);
    auto pick = [&rng](size_t size) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % uint64_t(size);
        uint64_t r;
        do r = rng();
        while (r >= limit);
        return size_t(r % size);
    };
    ExecutionState st = make_state(g.graph, cond, /*keep_trace=*/true);
    bool capped = false;
    while (!all_experts(st.graph)) {
        std::vector<Call> choices = permitted_calls(st, cond);
        if (choices.empty()) break;
        if (st.trace->size() >= cap) {
            capped = true;
            break;
        }
        st = advance_state(st, choices[pick(choices.size())]);
    }
    out << "trace: " << display(*st.trace, g) << "\n";
    bool successful = all_experts(st.graph);
    out << "result: " << (successful ? "successful" : capped ? "capped" : "stuck") << "\n";
    return successful ? 0 : 1;
}

int do_search(const NamedGraph& g, const ConditionExpr& cond, const std::string& mode,
              std::ostream& out) {
    if (mode == "minlen") {
        std::optional<int> len = min_success_length(g.graph, cond);
        if (len) {
            out << *len << "\n";
            return 0;
        }
        out << "unsuccessful\n";
        return 1;
    }
    SearchResult r = decide_success(g.graph, cond);
    if (mode == "weak") {
        if (r.witness) {
            out << "witness: " << display(*r.witness, g) << "\n";
            return 0;
        }
        out << "unsuccessful\n";
        return 1;
    }
    if (mode == "stuck") {
        if (r.stuck_witness) {
            out << "stuck: " << display(*r.stuck_witness, g) << "\n";
            return 0;
        }
        out << "no stuck sequence\n";
        return 1;
    }
    // strong: certify the verdict either way
    if (r.verdict == SuccessVerdict::strongly_successful) {
        out << "strongly successful\n";
        return 0;
    }
    out << (r.witness ? "weakly successful only" : "unsuccessful") << "\n";
    if (r.stuck_witness) out << "stuck: " << display(*r.stuck_witness, g) << "\n";
    if (r.infinite_witness)
        out << "infinite: " << display(r.infinite_witness->stem, g) << " ("
            << display(r.infinite_witness->cycle, g) << ")*\n";
    return 1;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"dynamic gossip graphs: classify, run, search, verify"};
    app.name("gossip");
    app.require_subcommand(1);

    std::string file, protocol, condition, sequence, mode = "weak", theorem, after;
    uint64_t seed = 0, cap = 100'000;
    int agents = 0, jobs = 1, runs = 200;
    bool mod_iso = false;
    std::optional<uint64_t> max_len;
    std::optional<uint64_t> verify_seed;

    auto add_protocol = [&](CLI::App* cmd) {
        CLI::Option* p = cmd->add_option("--protocol", protocol,
                                         "named protocol: any, tok, spi, co, wco, lns");
        CLI::Option* c = cmd->add_option("--condition", condition,
                                         "protocol condition, e.g. \"not knows-secret\"");
        p->excludes(c);
        c->excludes(p);
    };

    CLI::App* cmd_classify = app.add_subcommand("classify", "structural verdicts as JSON");
    cmd_classify->add_option("file", file, "graph file")->required();

    CLI::App* cmd_run = app.add_subcommand("run", "one random permitted execution");
    cmd_run->add_option("file", file, "graph file")->required();
    add_protocol(cmd_run);
    cmd_run->add_option("--seed", seed, "random stream (default 0)");
    cmd_run->add_option("--cap", cap, "give up after this many calls");

    CLI::App* cmd_check = app.add_subcommand("check", "validate a call sequence");
    cmd_check->add_option("file", file, "graph file")->required();
    add_protocol(cmd_check);
    cmd_check->add_option("--sequence", sequence, "calls, e.g. ab;bc or a>b;b>c")->required();

    CLI::App* cmd_search = app.add_subcommand("search", "exhaustive success search");
    cmd_search->add_option("file", file, "graph file")->required();
    add_protocol(cmd_search);
    cmd_search->add_option("--mode", mode, "weak | strong | stuck | minlen (default weak)")
        ->check(CLI::IsMember({"weak", "strong", "stuck", "minlen"}));

    CLI::App* cmd_ext = app.add_subcommand("extension", "all permitted sequences");
    cmd_ext->add_option("file", file, "graph file")->required();
    add_protocol(cmd_ext);
    cmd_ext->add_option("--max-len", max_len, "length bound (needed for unbounded protocols)");

    CLI::App* cmd_verify = app.add_subcommand("verify", "sweep a theorem over all graphs");
    cmd_verify->add_option("--theorem", theorem, "co-strong, wco-strong, lns-strong, lns-weak, "
                                                 "any-/tok-/spi-fair-empirical, hierarchy")
        ->required();
    cmd_verify->add_option("--agents", agents, "graph size to enumerate")->required();
    cmd_verify->add_flag("--mod-iso", mod_iso, "one representative per isomorphism class");
    cmd_verify->add_option("--jobs", jobs, "worker threads (default 1)");
    cmd_verify->add_option("--seed", verify_seed, "base seed for the empirical theorems");
    cmd_verify->add_option("--runs", runs, "random runs per graph (default 200)");
    cmd_verify->add_option("--cap", cap, "calls per run before giving up (default 100000)");
    cmd_verify->add_option("--max-len", max_len, "sequence bound for hierarchy (default 4)");

    CLI::App* cmd_dot = app.add_subcommand("dot", "GraphViz rendering");
    cmd_dot->add_option("file", file, "graph file")->required();
    cmd_dot->add_option("--after", after, "render the state after this call sequence");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_classify->parsed()) {
            out << classify_json(load_graph(file)).dump(2) << "\n";
            return 0;
        }
        if (cmd_run->parsed()) {
            NamedGraph g = load_graph(file);
            return do_run(g, *pick_condition(protocol, condition), seed, cap, out);
        }
        if (cmd_check->parsed()) {
            NamedGraph g = load_graph(file);
            ConditionPtr cond = pick_condition(protocol, condition);
            ValidationReport rep = validate_sequence(g.graph, parse_sequence(sequence, g), *cond);
            nlohmann::ordered_json j;
            j["permitted"] = rep.permitted;
            j["failing_index"] = rep.failing_index ? nlohmann::ordered_json(*rep.failing_index)
                                                   : nlohmann::ordered_json(nullptr);
            j["successful"] = rep.successful;
            j["stuck"] = rep.stuck;
            out << j.dump(2) << "\n";
            return rep.permitted && rep.successful ? 0 : 1;
        }
        if (cmd_search->parsed()) {
            NamedGraph g = load_graph(file);
            return do_search(g, *pick_condition(protocol, condition), mode, out);
        }
        if (cmd_ext->parsed()) {
            NamedGraph g = load_graph(file);
            ConditionPtr cond = pick_condition(protocol, condition);
            std::optional<size_t> bound;
            if (max_len) bound = size_t(*max_len);
            for (const ExtensionEntry& e : enumerate_extension(g.graph, *cond, bound)) {
                out << display(e.sequence, g);
                if (e.maximal) out << " [maximal]";
                out << "\n";
            }
            return 0;
        }
        if (cmd_verify->parsed()) {
            VerifyOptions opt;
            opt.mod_iso = mod_iso;
            opt.jobs = jobs;
            opt.runs = runs;
            opt.cap = cap;
            if (verify_seed) opt.seed = *verify_seed;
            if (max_len) opt.hierarchy_max_len = size_t(*max_len);
            VerificationReport rep = check_theorem(theorem, agents, opt);
            out << report_json(rep) << "\n";
            return rep.confirmed() ? 0 : 1;
        }
        if (cmd_dot->parsed()) {
            NamedGraph g = load_graph(file);
            if (!after.empty()) g.graph = apply_sequence(g.graph, parse_sequence(after, g));
            out << export_dot(g);
            return 0;
        }
    } catch (const TextParseError& e) {
        if (e.line > 0) err << "error: line " << e.line << ": " << e.what() << "\n";
        else err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConditionParseError& e) {
        err << "error: condition offset " << e.offset << ": " << e.what() << "\n";
        return 2;
    } catch (const SequenceError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2; // no subcommand dispatched; require_subcommand should prevent this
}

} // namespace gossip
