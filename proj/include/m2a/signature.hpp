#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "m2a/ast.hpp"
#include "m2a/diagnostics.hpp"
#include "m2a/poset.hpp"

namespace m2a {

// Operators with the same name and arity whose argument positions pairwise
// share a component; `representative` is the pointwise-greatest member.
struct ACClass {
    std::vector<int> members;   // OpDecl indices, declaration order
    int representative = -1;    // -1 when no pointwise upper member exists
};

struct SensibilityReport {
    bool strongly_sensible = true;
    bool maximal_bounding = true;
    std::vector<Diagnostic> violations;

    bool strictly_sensible() const {
        return strongly_sensible && maximal_bounding && violations.empty();
    }
};

inline std::string signature_string(const OpDecl& op) {
    std::string s = op.name + " :";
    for (const auto& a : op.args) s += " " + a;
    s += " -> " + op.target;
    return s;
}

// Least sort of `term`, computed bottom-up; annotates term->sort and
// term->decl_index. Returns empty string after reporting a diagnostic.
inline std::string least_sort(const TermPtr& term, const MaudeModule& m, const SortPoset& p,
                              DiagnosticBag& bag) {
    if (term->is_var) {
        if (term->sort.empty()) {
            const std::string* s = m.var_sort(term->name);
            if (!s) {
                bag.error("unknown-identifier", "variable '" + term->name + "' is not declared",
                          term->span);
                return {};
            }
            term->sort = *s;
        }
        return term->sort;
    }

    std::vector<std::string> arg_sorts;
    for (const auto& a : term->args) {
        std::string s = least_sort(a, m, p, bag);
        if (s.empty()) return {};
        arg_sorts.push_back(std::move(s));
    }

    // Applicable declarations: same name and arity, argument sorts above the
    // argument least sorts.
    std::vector<int> applicable;
    for (int i = 0; i < static_cast<int>(m.ops.size()); ++i) {
        const OpDecl& op = m.ops[i];
        if (op.name != term->name || op.args.size() != arg_sorts.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < arg_sorts.size() && ok; ++k)
            ok = p.less_eq(arg_sorts[k], op.args[k]);
        if (ok) applicable.push_back(i);
    }
    if (applicable.empty()) {
        bag.error("no-applicable-declaration",
                  "no declaration of '" + term->name + "' accepts the argument sorts",
                  term->span);
        return {};
    }

    int best = -1;
    for (int i : applicable) {
        if (best < 0 || p.strictly_less(m.ops[i].target, m.ops[best].target)) best = i;
    }
    for (int i : applicable) {
        if (!p.less_eq(m.ops[best].target, m.ops[i].target)) {
            bag.error("non-preregular",
                      "term has no least sort: applicable declarations of '" + term->name +
                          "' target incomparable sorts '" + m.ops[best].target + "' and '" +
                          m.ops[i].target + "'",
                      term->span);
            return {};
        }
    }
    term->sort = m.ops[best].target;
    term->decl_index = best;
    return term->sort;
}

namespace detail {

inline bool argument_compatible(const OpDecl& f, const OpDecl& g, const SortPoset& p) {
    if (f.name != g.name || f.args.size() != g.args.size()) return false;
    for (std::size_t i = 0; i < f.args.size(); ++i)
        if (!p.same_component(f.args[i], g.args[i])) return false;
    return true;
}

} // namespace detail

// Partitions same-name, same-arity declarations by argument compatibility.
// Classes are ordered by their first member's declaration index.
inline std::vector<ACClass> ac_classes(const MaudeModule& m, const SortPoset& p) {
    const int n = static_cast<int>(m.ops.size());
    std::vector<int> cls(n, -1);
    std::vector<ACClass> out;
    for (int i = 0; i < n; ++i) {
        if (cls[i] >= 0) continue;
        ACClass c;
        c.members.push_back(i);
        cls[i] = static_cast<int>(out.size());
        for (int j = i + 1; j < n; ++j)
            if (cls[j] < 0 && detail::argument_compatible(m.ops[i], m.ops[j], p)) {
                c.members.push_back(j);
                cls[j] = cls[i];
            }
        out.push_back(std::move(c));
    }
    for (auto& c : out) {
        for (int cand : c.members) {
            bool greatest = true;
            for (int other : c.members) {
                for (std::size_t k = 0; k < m.ops[cand].args.size() && greatest; ++k)
                    greatest = p.less_eq(m.ops[other].args[k], m.ops[cand].args[k]);
                if (!greatest) break;
            }
            if (greatest) {
                c.representative = cand;
                break;
            }
        }
    }
    return out;
}

inline const ACClass* class_of(const std::vector<ACClass>& classes, int decl_index) {
    for (const auto& c : classes)
        for (int i : c.members)
            if (i == decl_index) return &c;
    return nullptr;
}

// Strong sensibility: argument-compatible members share the target sort.
// Maximal argument-bounding: every class has a pointwise-greatest member.
inline SensibilityReport check_strict_sensibility(const std::vector<ACClass>& classes,
                                                  const MaudeModule& m) {
    SensibilityReport r;
    for (const auto& c : classes) {
        for (std::size_t i = 0; i < c.members.size(); ++i)
            for (std::size_t j = i + 1; j < c.members.size(); ++j) {
                const OpDecl& f = m.ops[c.members[i]];
                const OpDecl& g = m.ops[c.members[j]];
                if (f.target != g.target) {
                    r.strongly_sensible = false;
                    Diagnostic d;
                    d.severity = Severity::Error;
                    d.rule = "strong-sensibility";
                    d.message = "argument-compatible declarations of '" + f.name +
                                "' disagree on the target sort: " + signature_string(f) +
                                " vs " + signature_string(g);
                    d.span = g.span;
                    r.violations.push_back(std::move(d));
                }
            }
        if (c.representative < 0) {
            r.maximal_bounding = false;
            const OpDecl& f = m.ops[c.members.front()];
            Diagnostic d;
            d.severity = Severity::Error;
            d.rule = "maximal-bounding";
            d.message = "overload class of '" + f.name + "' (" +
                        std::to_string(c.members.size()) +
                        " declarations) has no pointwise-greatest member";
            d.span = f.span;
            r.violations.push_back(std::move(d));
        }
    }
    return r;
}

struct ConstructorInfo {
    std::vector<int> decls;                 // OpDecl indices carrying ctor, declaration order
    std::vector<bool> component_has_ctor;   // per poset component
};

// The ctor-attributed declarations, plus per-component coverage. Components
// without constructors draw a warning (their induction method is skipped).
inline ConstructorInfo constructor_subsignature(const MaudeModule& m, const SortPoset& p,
                                                DiagnosticBag& bag) {
    ConstructorInfo info;
    info.component_has_ctor.assign(p.components.size(), false);
    for (int i = 0; i < static_cast<int>(m.ops.size()); ++i)
        if (m.ops[i].ctor) {
            info.decls.push_back(i);
            int s = p.sort_index(m.ops[i].target);
            if (s >= 0) info.component_has_ctor[p.component_of[s]] = true;
        }
    for (std::size_t c = 0; c < p.components.size(); ++c)
        if (!info.component_has_ctor[c]) {
            bag.warning("no-constructors", "no constructor targets the component of sort '" +
                                               p.sorts[p.components[c].front()] +
                                               "'; its induction method will be skipped");
        }
    return info;
}

} // namespace m2a
