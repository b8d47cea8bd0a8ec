#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "m2a/theory.hpp"
#include "m2a/version.hpp"

namespace m2a {

struct EmitterConfig {
    int indent_width = 4;
    int line_width = 100;
    std::string variable_prefix = "_v"; // prefix of generated axiom variables
};

namespace detail {

// Renders a target term as an s-expression. `vp` prefixes variable
// occurrences: "?" under explicit forall binders, "" under define shorthands.
inline void render_term(std::ostream& os, const Term& t, const char* vp) {
    if (t.is_var) {
        os << vp << t.name;
        return;
    }
    if (t.args.empty()) {
        os << t.name;
        return;
    }
    os << '(' << t.name;
    for (const auto& a : t.args) {
        os << ' ';
        render_term(os, *a, vp);
    }
    os << ')';
}

inline std::string term_string(const Term& t, const char* vp) {
    std::ostringstream os;
    render_term(os, t, vp);
    return os.str();
}

inline std::string condition_string(const TargetCondition& c, const char* vp) {
    if (c.is_membership)
        return "(is_" + c.sort + " " + term_string(*c.lhs, vp) + ")";
    return "(" + term_string(*c.lhs, vp) + " = " + term_string(*c.rhs, vp) + ")";
}

inline std::string assertion_body(const TargetAssertion& a, const char* vp) {
    std::string body;
    if (a.is_membership_fact)
        body = "(is_" + a.sort + " " + term_string(*a.lhs, vp) + ")";
    else
        body = "(" + term_string(*a.lhs, vp) + " = " + term_string(*a.rhs, vp) + ")";
    if (!a.conditions.empty()) {
        std::string cond;
        if (a.conditions.size() == 1) {
            cond = condition_string(a.conditions[0], vp);
        } else {
            cond = "(and";
            for (const auto& c : a.conditions) cond += " " + condition_string(c, vp);
            cond += ")";
        }
        body = "(if " + cond + " " + body + ")";
    }
    for (auto it = a.binders.rbegin(); it != a.binders.rend(); ++it)
        body = "(forall ?" + it->first + ":" + it->second + " " + body + ")";
    return body;
}

// Obligation sentence: nested single-variable foralls around an implication
// from the induction hypotheses to the conclusion instance.
inline std::string obligation_sentence(const Obligation& ob) {
    std::string body = "(property " + term_string(*ob.concl, "") + ")";
    if (!ob.hyps.empty()) {
        std::string hyp;
        if (ob.hyps.size() == 1) {
            hyp = "(property " + term_string(*ob.hyps[0], "") + ")";
        } else {
            hyp = "(and";
            for (const auto& h : ob.hyps) hyp += " (property " + term_string(*h, "") + ")";
            hyp += ")";
        }
        body = "(if " + hyp + " " + body + ")";
    }
    for (auto it = ob.vars.rbegin(); it != ob.vars.rend(); ++it)
        body = "(forall " + it->first + " " + body + ")";
    return body;
}

inline void emit_check_block(std::ostream& os, const InductionScheme& s, std::size_t i,
                             int indent) {
    const Obligation& ob = s.obligations[i];
    std::string err = ob.inductive ? "Inductive step does not hold." : "Basis step does not hold.";
    std::string pad(indent, ' ');
    if (i + 1 == s.obligations.size()) {
        os << pad << "check {(holds? " << ob.name << ") => (forall " << s.conclusion_var
           << " (property " << s.conclusion_var << "))\n";
        os << std::string(indent + 6, ' ') << "| else => (error \"" << err << "\")}\n";
    } else {
        os << pad << "check { (holds? " << ob.name << ") =>\n";
        emit_check_block(os, s, i + 1, indent + 10);
        os << std::string(indent + 10, ' ') << "| else => (error \"" << err << "\")}\n";
    }
}

inline void emit_method(std::ostream& os, const InductionScheme& s) {
    os << "primitive-method (" << s.method_name << " property) :=\n";
    os << "  let {\n";
    for (std::size_t i = 0; i < s.obligations.size(); ++i) {
        os << "    " << s.obligations[i].name << " := "
           << obligation_sentence(s.obligations[i]);
        if (i + 1 < s.obligations.size()) os << ';';
        os << '\n';
    }
    os << "    }\n";
    emit_check_block(os, s, 0, 4);
}

} // namespace detail

// Renders one translated module as Athena text. The output is deterministic:
// section order, declaration order inside each section, and whitespace depend
// only on the theory value.
inline std::string emit_theory(const TranslatedTheory& th, const EmitterConfig& cfg = {}) {
    std::ostringstream os;
    os << "# module " << th.module_name << " translated by " << tool_name << " "
       << version_string << "\n\n";

    for (const auto& dt : th.datatypes) {
        os << "datatype " << dt.sort << " :=";
        for (std::size_t i = 0; i < dt.ctors.size(); ++i) {
            os << (i == 0 ? " " : " | ");
            if (dt.ctors[i].args.empty()) {
                os << dt.ctors[i].name;
            } else {
                os << '(' << dt.ctors[i].name;
                for (const auto& a : dt.ctors[i].args) os << ' ' << a;
                os << ')';
            }
        }
        os << '\n';
    }
    for (const auto& dom : th.domains) {
        os << (dom.sorts.size() == 1 ? "domain" : "domains");
        for (std::size_t i = 0; i < dom.sorts.size(); ++i)
            os << (i == 0 ? " " : ", ") << dom.sorts[i];
        os << '\n';
    }
    if (!th.datatypes.empty() || !th.domains.empty()) os << '\n';

    bool any_decl = false;
    for (const auto& sym : th.symbols) {
        if (sym.in_datatype) continue;
        os << "declare " << sym.name << " : [";
        for (std::size_t i = 0; i < sym.args.size(); ++i) os << (i ? " " : "") << sym.args[i];
        os << "] -> " << sym.target << '\n';
        any_decl = true;
    }
    if (any_decl) os << '\n';

    for (const auto& d : th.defines) {
        os << "define [";
        for (std::size_t i = 0; i < d.names.size(); ++i) os << (i ? " " : "") << d.names[i];
        os << "] := [";
        for (std::size_t i = 0; i < d.names.size(); ++i)
            os << (i ? " " : "") << '?' << d.names[i] << ':' << d.sorts[i];
        os << "]\n";
    }
    if (!th.defines.empty()) os << '\n';

    for (const auto& a : th.assertions) {
        const char* vp = a.binders.empty() ? "" : "?";
        std::string head = std::string(a.starred ? "assert*" : "assert") + " " + a.name + " :=";
        std::string body = detail::assertion_body(a, vp);
        if (static_cast<int>(head.size() + 1 + body.size()) <= cfg.line_width)
            os << head << ' ' << body << '\n';
        else
            os << head << '\n' << std::string(cfg.indent_width, ' ') << body << '\n';
    }
    if (!th.assertions.empty() && !th.methods.empty()) os << '\n';

    for (std::size_t i = 0; i < th.methods.size(); ++i) {
        if (i > 0) os << '\n';
        detail::emit_method(os, th.methods[i]);
    }
    return os.str();
}

// Athena-side token stream used by tests and golden comparisons: comments are
// dropped, strings stay single tokens, and the multi-character units
// ":=" "::" "->" "=>" survive while other delimiters split.
inline std::vector<std::string> tokenize_athena(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    const std::string singles = "()[]{};,|";
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '"') {
            flush();
            std::string s(1, c);
            for (++i; i < text.size(); ++i) {
                s.push_back(text[i]);
                if (text[i] == '\\' && i + 1 < text.size())
                    s.push_back(text[++i]);
                else if (text[i] == '"')
                    break;
            }
            out.push_back(s);
            continue;
        }
        if (c == '#') { // comment to end of line
            flush();
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (singles.find(c) != std::string::npos) {
            flush();
            out.emplace_back(1, c);
            continue;
        }
        auto two = [&](char a, char b) { return c == a && i + 1 < text.size() && text[i + 1] == b; };
        if (two(':', '=') || two(':', ':') || two('-', '>') || two('=', '>')) {
            flush();
            out.push_back(std::string(1, c) + text[i + 1]);
            ++i;
            continue;
        }
        if (c == ':') {
            flush();
            out.emplace_back(1, c);
            continue;
        }
        cur.push_back(c);
    }
    flush();
    return out;
}

// Checks that (), [], {} nest properly outside string literals.
inline bool balanced_delimiters(const std::string& text) {
    std::vector<char> stack;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '(' || c == '[' || c == '{') {
            stack.push_back(c);
        } else if (c == ')' || c == ']' || c == '}') {
            char open = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (stack.empty() || stack.back() != open) return false;
            stack.pop_back();
        }
    }
    return stack.empty() && !in_string;
}

} // namespace m2a
