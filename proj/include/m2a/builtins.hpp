#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "m2a/ast.hpp"
#include "m2a/diagnostics.hpp"

namespace m2a {

// Signature stubs for the supported built-in modules: sorts, numeric
// constants, and arithmetic operator declarations. No equations; the
// constants carry no ctor attribute so that built-in sorts never
// contribute constructors to induction schemes.
namespace builtins {

inline bool is_numeral(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

inline bool is_supported(const std::string& name) {
    return name == "BOOL" || name == "NAT" || name == "INT";
}

inline OpDecl constant(const std::string& name, const std::string& sort) {
    OpDecl op;
    op.name = name;
    op.target = sort;
    op.from_builtin = true;
    return op;
}

inline OpDecl binop(const std::string& name, const std::string& sort) {
    OpDecl op;
    op.name = name;
    op.args = {sort, sort};
    op.target = sort;
    op.from_builtin = true;
    return op;
}

// Appends the stub's sorts and operators to the module. `numerals` lists the
// integer literals appearing in the module source; each becomes a constant.
inline void splice(MaudeModule& m, const std::string& import,
                   const std::vector<std::string>& numerals, DiagnosticBag& bag) {
    auto add_sort = [&](const std::string& s) {
        if (!m.has_sort(s)) m.sorts.push_back(s);
    };
    auto add_numerals = [&](const std::string& sort) {
        std::vector<std::string> lits = {"0", "1"};
        for (const auto& n : numerals) {
            bool dup = false;
            for (const auto& l : lits) dup = dup || l == n;
            if (!dup) lits.push_back(n);
        }
        std::sort(lits.begin(), lits.end(), [](const std::string& a, const std::string& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        for (const auto& l : lits) m.ops.push_back(constant(l, sort));
    };

    if (import == "BOOL") {
        add_sort("Bool");
        m.ops.push_back(constant("true", "Bool"));
        m.ops.push_back(constant("false", "Bool"));
    } else if (import == "NAT") {
        add_sort("Nat");
        add_numerals("Nat");
        m.ops.push_back(binop("_+_", "Nat"));
        m.ops.push_back(binop("_*_", "Nat"));
    } else if (import == "INT") {
        add_sort("Int");
        add_numerals("Int");
        m.ops.push_back(binop("_+_", "Int"));
        m.ops.push_back(binop("_-_", "Int"));
        m.ops.push_back(binop("_*_", "Int"));
    } else {
        bag.error("unsupported-import",
                  "unsupported import '" + import + "' (only BOOL, NAT, INT are available)");
    }
}

} // namespace builtins
} // namespace m2a
