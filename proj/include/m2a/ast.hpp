#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "m2a/diagnostics.hpp"
#include "m2a/token.hpp"

namespace m2a {

struct Term;
using TermPtr = std::shared_ptr<Term>;

// Variable or operator application. `sort` is the declared sort for
// variables and the least sort for applications (filled by least_sort).
struct Term {
    bool is_var = false;
    std::string name;        // variable name, or the operator's mixfix name
    std::vector<TermPtr> args;
    std::string sort;
    int decl_index = -1;     // for applications: the OpDecl chosen by least_sort
    Span span;
};

inline TermPtr make_var(std::string name, std::string sort, Span span = {}) {
    auto t = std::make_shared<Term>();
    t->is_var = true;
    t->name = std::move(name);
    t->sort = std::move(sort);
    t->span = span;
    return t;
}

inline TermPtr make_app(std::string op, std::vector<TermPtr> args, Span span = {}) {
    auto t = std::make_shared<Term>();
    t->is_var = false;
    t->name = std::move(op);
    t->args = std::move(args);
    t->span = span;
    return t;
}

inline bool same_term(const Term& a, const Term& b) {
    if (a.is_var != b.is_var || a.name != b.name || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same_term(*a.args[i], *b.args[i])) return false;
    return true;
}

inline std::size_t term_size(const Term& t) {
    std::size_t n = 1;
    for (const auto& a : t.args) n += term_size(*a);
    return n;
}

struct OpDecl {
    std::string name;                 // mixfix name; underscores mark argument slots
    std::vector<std::string> args;
    std::string target;
    bool ctor = false;
    bool assoc = false;
    bool comm = false;
    bool has_id = false;
    std::vector<Token> id_tokens;     // raw tokens of the id: element, resolved later
    TermPtr id_term;                  // resolved identity element
    bool from_builtin = false;
    Span span;
};

inline std::size_t mixfix_arity(const std::string& name) {
    std::size_t n = 0;
    for (char c : name)
        if (c == '_') ++n;
    return n;
}

// Number of argument slots: underscore count for mixfix names, explicit
// otherwise (prefix operators take any arity with zero underscores).
inline std::size_t op_arity(const OpDecl& op) { return op.args.size(); }

struct ConditionFragment {
    enum class Kind { Equality, SortTest };
    Kind kind = Kind::Equality;
    TermPtr lhs;          // Equality: both sides; SortTest: the subject in lhs
    TermPtr rhs;
    std::string sort;     // SortTest target sort
    Span span;
};

struct EquationDecl {
    TermPtr lhs;
    TermPtr rhs;
    std::vector<ConditionFragment> condition;
    Span span;
};

struct MembershipDecl {
    TermPtr subject;
    std::string sort;
    std::vector<ConditionFragment> condition;
    Span span;
};

struct MaudeModule {
    std::string name;
    std::vector<std::string> sorts;                            // declaration order
    std::vector<std::pair<std::string, std::string>> subsorts; // declared (sub, super) pairs
    std::vector<std::string> imports;
    std::vector<OpDecl> ops;
    std::vector<std::pair<std::string, std::string>> vars;     // (name, sort), declaration order
    std::vector<EquationDecl> equations;
    std::vector<MembershipDecl> memberships;

    bool has_sort(const std::string& s) const {
        for (const auto& x : sorts)
            if (x == s) return true;
        return false;
    }
    const std::string* var_sort(const std::string& name) const {
        for (const auto& [n, s] : vars)
            if (n == name) return &s;
        return nullptr;
    }
};

} // namespace m2a
