#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "m2a/ast.hpp"

namespace m2a {

// Canonical Maude rendering of a term: mixfix applications fully
// parenthesized, prefix applications as name(arg, ...).
inline std::string print_term(const Term& t) {
    if (t.is_var) return t.name;
    if (t.args.empty()) return t.name;
    std::ostringstream os;
    if (mixfix_arity(t.name) == t.args.size()) {
        // Space-separated template parts keep the rendering retokenizable.
        std::vector<std::string> parts;
        std::size_t arg = 0;
        std::string lit;
        for (char c : t.name) {
            if (c == '_') {
                if (!lit.empty()) {
                    parts.push_back(lit);
                    lit.clear();
                }
                parts.push_back(print_term(*t.args[arg++]));
            } else {
                lit.push_back(c);
            }
        }
        if (!lit.empty()) parts.push_back(lit);
        os << '(';
        for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? " " : "") << parts[i];
        os << ')';
    } else {
        os << t.name << '(';
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i) os << ", ";
            os << print_term(*t.args[i]);
        }
        os << ')';
    }
    return os.str();
}

inline std::string print_condition(const std::vector<ConditionFragment>& cond) {
    std::ostringstream os;
    for (std::size_t i = 0; i < cond.size(); ++i) {
        if (i) os << " /\\ ";
        const auto& f = cond[i];
        if (f.kind == ConditionFragment::Kind::Equality)
            os << print_term(*f.lhs) << " = " << print_term(*f.rhs);
        else
            os << print_term(*f.lhs) << " : " << f.sort;
    }
    return os.str();
}

// Renders the module in the accepted subset syntax. Built-in declarations
// are omitted; the `protecting` lines reintroduce them on reparse.
inline std::string print_module(const MaudeModule& m) {
    std::ostringstream os;
    os << "fmod " << m.name << " is\n";
    for (const auto& imp : m.imports) os << "  protecting " << imp << " .\n";
    std::vector<std::string> own_sorts;
    for (const auto& s : m.sorts) {
        bool builtin_only = (s == "Bool" || s == "Int" || s == "Nat");
        if (builtin_only) {
            bool imported = false;
            for (const auto& imp : m.imports)
                imported = imported || (imp == "BOOL" && s == "Bool") ||
                           (imp == "INT" && s == "Int") || (imp == "NAT" && s == "Nat");
            if (imported) continue;
        }
        own_sorts.push_back(s);
    }
    if (!own_sorts.empty()) {
        os << "  sorts";
        for (const auto& s : own_sorts) os << ' ' << s;
        os << " .\n";
    }
    for (const auto& [sub, super] : m.subsorts) os << "  subsort " << sub << " < " << super << " .\n";
    for (const auto& op : m.ops) {
        if (op.from_builtin) continue;
        os << "  op " << op.name << " :";
        for (const auto& a : op.args) os << ' ' << a;
        os << " -> " << op.target;
        std::vector<std::string> attrs;
        if (op.ctor) attrs.push_back("ctor");
        if (op.assoc) attrs.push_back("assoc");
        if (op.comm) attrs.push_back("comm");
        if (op.has_id) attrs.push_back("id: " + (op.id_term ? print_term(*op.id_term) : std::string()));
        if (!attrs.empty()) {
            os << " [";
            for (std::size_t i = 0; i < attrs.size(); ++i) os << (i ? " " : "") << attrs[i];
            os << ']';
        }
        os << " .\n";
    }
    for (const auto& [name, sort] : m.vars) os << "  var " << name << " : " << sort << " .\n";
    for (const auto& e : m.equations) {
        os << (e.condition.empty() ? "  eq " : "  ceq ") << print_term(*e.lhs) << " = "
           << print_term(*e.rhs);
        if (!e.condition.empty()) os << " if " << print_condition(e.condition);
        os << " .\n";
    }
    for (const auto& mb : m.memberships) {
        os << (mb.condition.empty() ? "  mb " : "  cmb ") << print_term(*mb.subject) << " : "
           << mb.sort;
        if (!mb.condition.empty()) os << " if " << print_condition(mb.condition);
        os << " .\n";
    }
    os << "endfm\n";
    return os.str();
}

inline bool same_condition(const std::vector<ConditionFragment>& a,
                           const std::vector<ConditionFragment>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].kind != b[i].kind) return false;
        if (!same_term(*a[i].lhs, *b[i].lhs)) return false;
        if (a[i].kind == ConditionFragment::Kind::Equality) {
            if (!same_term(*a[i].rhs, *b[i].rhs)) return false;
        } else if (a[i].sort != b[i].sort) {
            return false;
        }
    }
    return true;
}

// Structural module equality, ignoring spans.
inline bool same_module(const MaudeModule& a, const MaudeModule& b) {
    if (a.name != b.name || a.sorts != b.sorts || a.subsorts != b.subsorts ||
        a.imports != b.imports || a.vars != b.vars)
        return false;
    if (a.ops.size() != b.ops.size() || a.equations.size() != b.equations.size() ||
        a.memberships.size() != b.memberships.size())
        return false;
    for (std::size_t i = 0; i < a.ops.size(); ++i) {
        const OpDecl& x = a.ops[i];
        const OpDecl& y = b.ops[i];
        if (x.name != y.name || x.args != y.args || x.target != y.target || x.ctor != y.ctor ||
            x.assoc != y.assoc || x.comm != y.comm || x.has_id != y.has_id)
            return false;
        if (x.has_id && !(x.id_term && y.id_term && same_term(*x.id_term, *y.id_term)))
            return false;
    }
    for (std::size_t i = 0; i < a.equations.size(); ++i) {
        if (!same_term(*a.equations[i].lhs, *b.equations[i].lhs)) return false;
        if (!same_term(*a.equations[i].rhs, *b.equations[i].rhs)) return false;
        if (!same_condition(a.equations[i].condition, b.equations[i].condition)) return false;
    }
    for (std::size_t i = 0; i < a.memberships.size(); ++i) {
        if (!same_term(*a.memberships[i].subject, *b.memberships[i].subject)) return false;
        if (a.memberships[i].sort != b.memberships[i].sort) return false;
        if (!same_condition(a.memberships[i].condition, b.memberships[i].condition)) return false;
    }
    return true;
}

} // namespace m2a
