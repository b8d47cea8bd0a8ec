#pragma once

#include <string>
#include <vector>

#include "m2a/ast.hpp"
#include "m2a/diagnostics.hpp"
#include "m2a/signature.hpp"

namespace m2a {

inline std::string strip_underscores(const std::string& name) {
    std::string out;
    for (char c : name)
        if (c != '_') out.push_back(c);
    return out;
}

// Flattens class representative names into unique Athena identifiers:
// mixfix underscores are stripped; classes whose stripped names collide all
// get a signature suffix `_<argsort1>_..._<target>`.
inline std::vector<std::string> mangle_class_names(const MaudeModule& m,
                                                   const std::vector<ACClass>& classes,
                                                   DiagnosticBag& bag) {
    std::vector<std::string> stripped(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const OpDecl& rep = m.ops[classes[i].representative];
        stripped[i] = strip_underscores(rep.name);
        if (stripped[i].empty())
            bag.error("unmappable-character",
                      "operator name '" + rep.name + "' strips to an empty identifier", rep.span);
    }
    std::vector<std::string> out = stripped;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        bool collides = false;
        for (std::size_t j = 0; j < classes.size(); ++j)
            collides = collides || (j != i && stripped[j] == stripped[i]);
        if (!collides) continue;
        const OpDecl& rep = m.ops[classes[i].representative];
        for (const auto& a : rep.args) out[i] += "_" + a;
        out[i] += "_" + rep.target;
    }
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j)
            if (out[i] == out[j] && !out[i].empty())
                bag.error("mangle-collision",
                          "mangled name '" + out[i] + "' is shared by two operator classes",
                          m.ops[classes[j].representative].span);
    return out;
}

inline std::string cast_symbol_name(const std::string& from, const std::string& to) {
    return "Cast_" + from + "_to_" + to;
}

inline std::string membership_predicate_name(const std::string& sort) { return "is_" + sort; }

} // namespace m2a
