#include "gossip/condition.hpp"

#include <cctype>
#include <sstream>

namespace gossip {

ConditionPtr cond_atom(CondKind kind) {
    return std::make_shared<ConditionExpr>(ConditionExpr{kind, nullptr, nullptr});
}

ConditionPtr cond_not(ConditionPtr a) {
    return std::make_shared<ConditionExpr>(ConditionExpr{CondKind::Not, std::move(a), nullptr});
}

ConditionPtr cond_and(ConditionPtr a, ConditionPtr b) {
    return std::make_shared<ConditionExpr>(
        ConditionExpr{CondKind::And, std::move(a), std::move(b)});
}

ConditionPtr cond_or(ConditionPtr a, ConditionPtr b) {
    return std::make_shared<ConditionExpr>(ConditionExpr{CondKind::Or, std::move(a), std::move(b)});
}

bool structurally_equal(const ConditionExpr& a, const ConditionExpr& b) {
    if (a.kind != b.kind) return false;
    if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
    return true;
}

MemorySignature signature_of(const ConditionExpr& e) {
    MemorySignature s;
    switch (e.kind) {
    case CondKind::KnowsSecret: s.needs_secret_relation = true; break;
    case CondKind::Called:
    case CondKind::WasCalledBy: s.needs_call_set = true; break;
    case CondKind::Fresh:
    case CondKind::LastOut:
    case CondKind::LastIn: s.needs_last_direction = true; break;
    default: break;
    }
    for (const ConditionPtr& child : {e.lhs, e.rhs})
        if (child) {
            MemorySignature c = signature_of(*child);
            s.needs_secret_relation |= c.needs_secret_relation;
            s.needs_call_set |= c.needs_call_set;
            s.needs_last_direction |= c.needs_last_direction;
        }
    return s;
}

namespace {

std::string describe_expected(const std::vector<std::string>& expected) {
    std::ostringstream out;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) out << (i + 1 == expected.size() ? " or " : ", ");
        out << expected[i];
    }
    return out.str();
}

} // namespace

ConditionParseError::ConditionParseError(std::size_t off, std::vector<std::string> exp)
    : std::runtime_error("syntax error at byte " + std::to_string(off) + ": expected " +
                         describe_expected(exp)),
      offset(off), expected(std::move(exp)) {}

namespace {

struct Token {
    std::string text;   // lowercased
    std::size_t offset; // byte position of the first character
};

// Words are letters and hyphens; '(' and ')' stand alone. Anything else
// (other than whitespace) is reported at its own offset.
std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if (std::isspace(c)) {
            ++i;
        } else if (c == '(' || c == ')') {
            out.push_back({std::string(1, char(c)), i});
            ++i;
        } else if (std::isalpha(c) || c == '-') {
            std::size_t start = i;
            std::string word;
            while (i < text.size() &&
                   (std::isalpha((unsigned char)text[i]) || text[i] == '-')) {
                word += char(std::tolower((unsigned char)text[i]));
                ++i;
            }
            out.push_back({word, start});
        } else {
            out.push_back({std::string(1, char(c)), i});
            ++i;
        }
    }
    out.push_back({"", text.size()}); // end marker
    return out;
}

const std::vector<std::string> kPrimaryExpected = {
    "true", "knows-secret", "called", "was-called-by",
    "fresh", "last-out",    "last-in", "not", "("};

class Parser {
  public:
    explicit Parser(std::string_view text) : toks_(lex(text)) {}

    ConditionPtr run() {
        ConditionPtr e = parse_or();
        if (!peek().text.empty()) fail({"and", "or", "end of input"});
        return e;
    }

  private:
    const Token& peek() const { return toks_[pos_]; }
    void advance() { ++pos_; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        throw ConditionParseError(peek().offset, std::move(expected));
    }

    ConditionPtr parse_or() {
        ConditionPtr e = parse_and();
        while (peek().text == "or") {
            advance();
            e = cond_or(std::move(e), parse_and());
        }
        return e;
    }

    ConditionPtr parse_and() {
        ConditionPtr e = parse_not();
        while (peek().text == "and") {
            advance();
            e = cond_and(std::move(e), parse_not());
        }
        return e;
    }

    ConditionPtr parse_not() {
        if (peek().text == "not") {
            advance();
            return cond_not(parse_not());
        }
        return parse_primary();
    }

    ConditionPtr parse_primary() {
        const std::string& t = peek().text;
        if (t == "(") {
            advance();
            ConditionPtr e = parse_or();
            if (peek().text != ")") fail({"and", "or", ")"});
            advance();
            return e;
        }
        static const std::pair<const char*, CondKind> atoms[] = {
            {"true", CondKind::True},
            {"knows-secret", CondKind::KnowsSecret},
            {"called", CondKind::Called},
            {"was-called-by", CondKind::WasCalledBy},
            {"fresh", CondKind::Fresh},
            {"last-out", CondKind::LastOut},
            {"last-in", CondKind::LastIn},
        };
        for (auto [name, kind] : atoms)
            if (t == name) {
                advance();
                return cond_atom(kind);
            }
        fail(kPrimaryExpected);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

const char* atom_name(CondKind k) {
    switch (k) {
    case CondKind::True: return "true";
    case CondKind::KnowsSecret: return "knows-secret";
    case CondKind::Called: return "called";
    case CondKind::WasCalledBy: return "was-called-by";
    case CondKind::Fresh: return "fresh";
    case CondKind::LastOut: return "last-out";
    case CondKind::LastIn: return "last-in";
    default: return "?";
    }
}

// Binding strength used to decide where parentheses are required.
int precedence(CondKind k) {
    switch (k) {
    case CondKind::Or: return 1;
    case CondKind::And: return 2;
    case CondKind::Not: return 3;
    default: return 4;
    }
}

void print(const ConditionExpr& e, std::string& out) {
    auto child = [&](const ConditionExpr& c, int min_prec) {
        if (precedence(c.kind) < min_prec) {
            out += '(';
            print(c, out);
            out += ')';
        } else {
            print(c, out);
        }
    };
    switch (e.kind) {
    case CondKind::Not:
        out += "not ";
        child(*e.lhs, precedence(CondKind::Not));
        break;
    case CondKind::And:
        child(*e.lhs, precedence(CondKind::And));
        out += " and ";
        // same-strength right child keeps its parens so the shape survives
        child(*e.rhs, precedence(CondKind::And) + 1);
        break;
    case CondKind::Or:
        child(*e.lhs, precedence(CondKind::Or));
        out += " or ";
        child(*e.rhs, precedence(CondKind::Or) + 1);
        break;
    default: out += atom_name(e.kind);
    }
}

} // namespace

ConditionPtr parse_condition(std::string_view text) { return Parser(text).run(); }

std::string format_condition(const ConditionExpr& e) {
    std::string out;
    print(e, out);
    return out;
}

ConditionPtr named_protocol(std::string_view id) {
    std::string low;
    for (char c : id) low += char(std::tolower((unsigned char)c));
    if (low == "any") return parse_condition("true");
    if (low == "tok") return parse_condition("fresh or last-in");
    if (low == "spi") return parse_condition("fresh or last-out");
    if (low == "co") return parse_condition("not called and not was-called-by");
    if (low == "wco") return parse_condition("not called");
    if (low == "lns") return parse_condition("not knows-secret");
    throw std::invalid_argument("unknown protocol '" + std::string(id) +
                                "' (expected any, tok, spi, co, wco, or lns)");
}

} // namespace gossip
