#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "m2a/ast.hpp"
#include "m2a/diagnostics.hpp"
#include "m2a/mangle.hpp"
#include "m2a/poset.hpp"
#include "m2a/signature.hpp"
#include "m2a/theory.hpp"

namespace m2a {

struct TranslateOptions {
    bool induction = true;
};

// Least upper bound of two sorts of one component: the unique minimal common
// upper bound when it exists, otherwise the component's kind sort.
inline std::string least_upper_bound(const SortPoset& p, const std::string& a,
                                     const std::string& b) {
    if (p.less_eq(a, b)) return b;
    if (p.less_eq(b, a)) return a;
    int ia = p.sort_index(a), ib = p.sort_index(b);
    if (ia < 0 || ib < 0) return a;
    std::vector<int> uppers;
    for (int u = 0; u < static_cast<int>(p.sorts.size()); ++u)
        if (p.leq[ia][u] && p.leq[ib][u]) uppers.push_back(u);
    std::vector<int> minimal;
    for (int u : uppers) {
        bool is_min = true;
        for (int v : uppers)
            if (v != u && p.leq[v][u] && !p.leq[u][v]) {
                is_min = false;
                break;
            }
        if (is_min) minimal.push_back(u);
    }
    if (minimal.size() == 1) return p.sorts[minimal[0]];
    return p.kind_of_sort(a);
}

// A fully analysed module plus its many-sorted image. The stored module may
// carry synthesized kind sorts appended to the original's sort list.
struct Translation {
    MaudeModule module;
    SortPoset poset;
    std::vector<ACClass> classes;
    ConstructorInfo ctors;
    SensibilityReport sensibility;
    std::vector<std::string> class_names; // mangled, parallel to classes
    std::vector<int> class_of_decl;       // OpDecl index -> class index
    std::vector<std::pair<std::string, std::string>> casts; // declaration order
    TranslatedTheory theory;

    std::vector<int> class_symbol; // class index -> theory symbol index
    std::map<std::pair<std::string, std::string>, int> cast_symbol;

    std::string kind_of(const std::string& sort) const { return poset.kind_of_sort(sort); }

    TermPtr wrap_cast(TermPtr inner, const std::string& from, const std::string& to) const {
        auto it = cast_symbol.find({from, to});
        auto t = make_app(cast_symbol_name(from, to), {std::move(inner)});
        t->sort = to;
        t->decl_index = it == cast_symbol.end() ? -1 : it->second;
        return t;
    }

    // Source term -> target term of exactly the expected sort: arguments get
    // one direct cast up to the representative's argument sorts, and the
    // result is wrapped once when its sort lies strictly below `expected`.
    TermPtr tr_term(const TermPtr& t, const std::string& expected, DiagnosticBag& bag) const {
        TermPtr out;
        if (t->is_var) {
            out = make_var(t->name, t->sort, t->span);
        } else {
            if (t->decl_index < 0 || t->decl_index >= static_cast<int>(module.ops.size())) {
                bag.error("internal-audit", "term '" + t->name + "' has no resolved declaration",
                          t->span);
                return make_var(t->name, expected);
            }
            int cls = class_of_decl[t->decl_index];
            const OpDecl& rep = module.ops[classes[cls].representative];
            std::vector<TermPtr> args;
            for (std::size_t i = 0; i < t->args.size(); ++i)
                args.push_back(tr_term(t->args[i], rep.args[i], bag));
            out = make_app(class_names[cls], std::move(args), t->span);
            out->sort = rep.target;
            out->decl_index = class_symbol[cls];
        }
        if (out->sort == expected) return out;
        std::string from = out->sort;
        if (!poset.strictly_less(from, expected)) {
            bag.error("incomparable-sorts",
                      "cannot cast sort '" + from + "' up to '" + expected + "'", t->span);
            return out;
        }
        return wrap_cast(std::move(out), from, expected);
    }
};

namespace detail {

// Allocates obligation variables x, x1, x2, ... shared across all induction
// methods of one module: a name is reused only at the sort it was first given
// and never twice inside one obligation sentence.
struct ObligationVars {
    std::map<std::string, std::string> sort_of;
    std::vector<std::string> order;      // allocation order, for define lines
    std::set<std::string> reserved;      // module variable names

    std::string alloc(const std::string& sort, std::set<std::string>& in_use) {
        for (std::size_t n = 0;; ++n) {
            std::string cand = n == 0 ? "x" : "x" + std::to_string(n);
            if (reserved.count(cand) || cand == "property") continue;
            auto it = sort_of.find(cand);
            if (it != sort_of.end()) {
                if (it->second != sort || in_use.count(cand)) continue;
            } else {
                sort_of.emplace(cand, sort);
                order.push_back(cand);
            }
            in_use.insert(cand);
            return cand;
        }
    }
};

inline std::string lowercased(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace detail

inline std::optional<Translation> translate(const MaudeModule& input, DiagnosticBag& bag,
                                            TranslateOptions opts = {}) {
    Translation tr;
    tr.module = input;

    // Sort analysis; synthesize a kind sort for each component with several
    // maximal sorts so every component has a unique top for casts and kinds.
    {
        DiagnosticBag scratch;
        SortPoset base = build_poset(tr.module, scratch);
        for (const auto& d : scratch.all()) bag.report(d.severity, d.rule, d.message, d.span);
        if (scratch.has_errors()) return std::nullopt;
        for (std::size_t c = 0; c < base.components.size(); ++c) {
            if (base.maximal[c].size() <= 1) continue;
            std::string kind = base.kind_name(static_cast<int>(c));
            bag.warning("multiple-maximal",
                        "component of sort '" + base.sorts[base.components[c].front()] + "' has " +
                            std::to_string(base.maximal[c].size()) +
                            " maximal sorts; synthesizing kind sort '" + kind + "'");
            tr.module.sorts.push_back(kind);
            for (int ms : base.maximal[c]) tr.module.subsorts.emplace_back(base.sorts[ms], kind);
        }
    }
    tr.poset = build_poset(tr.module, bag);
    for (const auto& op : tr.module.ops) {
        for (const auto& a : op.args)
            if (tr.poset.sort_index(a) < 0)
                bag.error("undeclared-sort",
                          "operator '" + op.name + "' uses undeclared sort '" + a + "'", op.span);
        if (tr.poset.sort_index(op.target) < 0)
            bag.error("undeclared-sort",
                      "operator '" + op.name + "' targets undeclared sort '" + op.target + "'",
                      op.span);
    }
    for (const auto& nv : tr.module.vars)
        if (tr.poset.sort_index(nv.second) < 0)
            bag.error("undeclared-sort",
                      "variable '" + nv.first + "' has undeclared sort '" + nv.second + "'");
    if (bag.has_errors()) return std::nullopt;

    // Overload classes and the signature conditions the translation needs.
    tr.classes = ac_classes(tr.module, tr.poset);
    tr.sensibility = check_strict_sensibility(tr.classes, tr.module);
    if (!tr.sensibility.strictly_sensible()) {
        for (const auto& d : tr.sensibility.violations)
            bag.report(d.severity, d.rule, d.message, d.span);
        return std::nullopt;
    }
    {
        DiagnosticBag scratch;
        tr.ctors = constructor_subsignature(tr.module, tr.poset, opts.induction ? bag : scratch);
    }
    tr.class_of_decl.assign(tr.module.ops.size(), -1);
    for (std::size_t c = 0; c < tr.classes.size(); ++c)
        for (int m : tr.classes[c].members) tr.class_of_decl[m] = static_cast<int>(c);
    tr.class_names = mangle_class_names(tr.module, tr.classes, bag);
    if (bag.has_errors()) return std::nullopt;

    const SortPoset& p = tr.poset;
    const MaudeModule& m = tr.module;
    TranslatedTheory& th = tr.theory;
    th.module_name = m.name;

    // Sorts: a single-sort component with constructors becomes a datatype;
    // every other component becomes one domains line in declaration order.
    std::vector<bool> datatype_comp(p.components.size(), false);
    for (std::size_t c = 0; c < p.components.size(); ++c)
        datatype_comp[c] = p.components[c].size() == 1 && tr.ctors.component_has_ctor[c];

    // Symbols: user classes by first declaration, then casts, then membership
    // predicates. Constructor classes of datatype components are carried by
    // the datatype line instead of a declare.
    tr.class_symbol.assign(tr.classes.size(), -1);
    for (std::size_t c = 0; c < tr.classes.size(); ++c) {
        const ACClass& cls = tr.classes[c];
        const OpDecl& rep = m.ops[cls.representative];
        bool any_ctor = false;
        for (int d : cls.members) any_ctor = any_ctor || m.ops[d].ctor;
        int tcomp = p.component_of[p.sort_index(rep.target)];
        TargetSymbol sym;
        sym.name = tr.class_names[c];
        sym.args = rep.args;
        sym.target = rep.target;
        sym.role = any_ctor ? SymbolRole::Constructor : SymbolRole::Function;
        sym.source_decl = cls.representative;
        sym.in_datatype = any_ctor && datatype_comp[tcomp];
        tr.class_symbol[c] = static_cast<int>(th.symbols.size());
        th.symbols.push_back(std::move(sym));
    }
    tr.casts = strict_cast_pairs(m, p);
    for (const auto& [from, to] : tr.casts) {
        TargetSymbol sym;
        sym.name = cast_symbol_name(from, to);
        sym.args = {from};
        sym.target = to;
        sym.role = SymbolRole::Cast;
        tr.cast_symbol[{from, to}] = static_cast<int>(th.symbols.size());
        th.symbols.push_back(std::move(sym));
    }
    std::map<std::string, int> predicate_symbol;
    auto declare_predicate = [&](const std::string& sort) {
        if (predicate_symbol.count(sort)) return;
        TargetSymbol sym;
        sym.name = membership_predicate_name(sort);
        sym.args = {p.kind_of_sort(sort)};
        sym.target = "Boolean";
        sym.role = SymbolRole::Predicate;
        predicate_symbol[sort] = static_cast<int>(th.symbols.size());
        th.symbols.push_back(std::move(sym));
    };
    for (const auto& mb : m.memberships) {
        declare_predicate(mb.sort);
        for (const auto& frag : mb.condition)
            if (frag.kind == ConditionFragment::Kind::SortTest) declare_predicate(frag.sort);
    }
    for (const auto& eq : m.equations)
        for (const auto& frag : eq.condition)
            if (frag.kind == ConditionFragment::Kind::SortTest) declare_predicate(frag.sort);

    // Datatype declarations, one per constructor component without subsorts.
    for (std::size_t c = 0; c < p.components.size(); ++c) {
        if (!datatype_comp[c]) {
            DomainsDecl dom;
            for (int s : p.components[c]) dom.sorts.push_back(p.sorts[s]);
            th.domains.push_back(std::move(dom));
            continue;
        }
        DatatypeDecl dt;
        dt.sort = p.sorts[p.components[c].front()];
        std::set<int> seen_classes;
        for (int d : tr.ctors.decls) {
            if (m.ops[d].target != dt.sort) continue;
            int cls = tr.class_of_decl[d];
            if (!seen_classes.insert(cls).second) continue;
            const OpDecl& rep = m.ops[tr.classes[cls].representative];
            dt.ctors.push_back({tr.class_names[cls], rep.args});
        }
        th.datatypes.push_back(std::move(dt));
    }

    // Variable shorthands: all module variables on one define line.
    if (!m.vars.empty()) {
        DefineLine line;
        for (const auto& [n, s] : m.vars) {
            line.names.push_back(n);
            line.sorts.push_back(s);
        }
        th.defines.push_back(std::move(line));
    }

    // Structural-axiom assertions. Each attributed operator contributes fresh
    // _vN variables (numbered across the whole module) and one define line.
    int vcount = 0;
    auto apply_class = [&](int cls, std::vector<TermPtr> args) {
        const OpDecl& rep = m.ops[tr.classes[cls].representative];
        for (std::size_t i = 0; i < args.size(); ++i)
            if (args[i]->sort != rep.args[i]) {
                std::string from = args[i]->sort;
                args[i] = tr.wrap_cast(std::move(args[i]), from, rep.args[i]);
            }
        auto t = make_app(tr.class_names[cls], std::move(args));
        t->sort = rep.target;
        t->decl_index = tr.class_symbol[cls];
        return t;
    };
    for (std::size_t c = 0; c < tr.classes.size(); ++c) {
        const ACClass& cls = tr.classes[c];
        bool assoc = false, comm = false;
        const OpDecl* id_decl = nullptr;
        for (int d : cls.members) {
            assoc = assoc || m.ops[d].assoc;
            comm = comm || m.ops[d].comm;
            if (m.ops[d].has_id && !id_decl) id_decl = &m.ops[d];
        }
        if (!assoc && !comm && !id_decl) continue;
        const OpDecl& rep = m.ops[cls.representative];
        if (rep.args.size() != 2 || rep.args[0] != rep.args[1] || rep.args[0] != rep.target) {
            bag.error("invalid-attribute",
                      "structural axioms require a uniform binary signature, got " +
                          signature_string(rep),
                      rep.span);
            continue;
        }
        const std::string& vs = rep.target;
        DefineLine line;
        auto fresh = [&]() {
            std::string n = "_v" + std::to_string(++vcount);
            line.names.push_back(n);
            line.sorts.push_back(vs);
            return make_var(n, vs);
        };
        const std::string& op = tr.class_names[c];
        if (assoc) {
            auto a = fresh(), b = fresh(), cc = fresh();
            TargetAssertion as;
            as.name = "assoc_" + op;
            as.lhs = apply_class(static_cast<int>(c), {apply_class(static_cast<int>(c), {a, b}), cc});
            as.rhs = apply_class(static_cast<int>(c), {a, apply_class(static_cast<int>(c), {b, cc})});
            th.assertions.push_back(std::move(as));
        }
        if (comm) {
            auto a = fresh(), b = fresh();
            TargetAssertion as;
            as.name = "comm_" + op;
            as.lhs = apply_class(static_cast<int>(c), {a, b});
            as.rhs = apply_class(static_cast<int>(c), {b, a});
            th.assertions.push_back(std::move(as));
        }
        if (id_decl && !id_decl->id_term)
            bag.error("internal-audit", "identity element of '" + rep.name + "' is unresolved",
                      id_decl->span);
        if (id_decl && id_decl->id_term) {
            auto v = fresh();
            TermPtr id_l = tr.tr_term(id_decl->id_term, rep.args[0], bag);
            TargetAssertion left;
            left.name = "left_id_" + op;
            left.lhs = apply_class(static_cast<int>(c), {id_l, v});
            left.rhs = v;
            th.assertions.push_back(std::move(left));
            TermPtr id_r = tr.tr_term(id_decl->id_term, rep.args[1], bag);
            TargetAssertion right;
            right.name = "right_id_" + op;
            right.lhs = apply_class(static_cast<int>(c), {v, id_r});
            right.rhs = v;
            th.assertions.push_back(std::move(right));
        }
        th.defines.push_back(std::move(line));
    }

    // Cast composition laws, one per composable strict triple.
    {
        const int n = static_cast<int>(p.sorts.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    if (!(i != j && p.leq[i][j]) || !(j != k && p.leq[j][k])) continue;
                    const std::string &s = p.sorts[i], &s1 = p.sorts[j], &s2 = p.sorts[k];
                    TargetAssertion as;
                    as.name = "core_eq_" + s + "_" + s1 + "_" + s2;
                    as.starred = false;
                    as.binders = {{"x", s}};
                    auto v = make_var("x", s);
                    as.lhs = tr.wrap_cast(tr.wrap_cast(v, s, s1), s1, s2);
                    as.rhs = tr.wrap_cast(make_var("x", s), s, s2);
                    th.assertions.push_back(std::move(as));
                }
    }

    // Equations: both sides cast to the least upper bound of their least
    // sorts; condition fragments translate the same way, sort tests at the
    // tested sort's kind.
    auto translate_condition = [&](const std::vector<ConditionFragment>& frags) {
        std::vector<TargetCondition> out;
        for (const auto& frag : frags) {
            TargetCondition c;
            if (frag.kind == ConditionFragment::Kind::Equality) {
                std::string lub = least_upper_bound(p, frag.lhs->sort, frag.rhs->sort);
                c.lhs = tr.tr_term(frag.lhs, lub, bag);
                c.rhs = tr.tr_term(frag.rhs, lub, bag);
            } else {
                c.is_membership = true;
                c.sort = frag.sort;
                c.lhs = tr.tr_term(frag.lhs, p.kind_of_sort(frag.sort), bag);
            }
            out.push_back(std::move(c));
        }
        return out;
    };
    int eq_count = 0;
    for (const auto& eq : m.equations) {
        TargetAssertion as;
        as.name = "eq_" + std::to_string(++eq_count);
        std::string lub = least_upper_bound(p, eq.lhs->sort, eq.rhs->sort);
        as.lhs = tr.tr_term(eq.lhs, lub, bag);
        as.rhs = tr.tr_term(eq.rhs, lub, bag);
        as.conditions = translate_condition(eq.condition);
        th.assertions.push_back(std::move(as));
    }
    int mb_count = 0;
    for (const auto& mb : m.memberships) {
        TargetAssertion as;
        as.name = "mb_" + std::to_string(++mb_count);
        as.is_membership_fact = true;
        as.sort = mb.sort;
        as.lhs = tr.tr_term(mb.subject, p.kind_of_sort(mb.sort), bag);
        as.conditions = translate_condition(mb.condition);
        th.assertions.push_back(std::move(as));
    }

    // Structural-induction methods, one per domain component with
    // constructors. Constructors targeting sorts outside the directly
    // constructed set C are reached through cast injections instead.
    if (opts.induction) {
        detail::ObligationVars vars;
        for (const auto& nv : m.vars) vars.reserved.insert(nv.first);
        for (std::size_t c = 0; c < p.components.size(); ++c) {
            if (datatype_comp[c] || !tr.ctors.component_has_ctor[c]) continue;
            const std::string kind = p.kind_name(static_cast<int>(c));
            std::set<std::string> constructed; // the set C
            std::vector<int> ctor_decls;       // class-deduped, declaration order
            std::set<int> seen_classes;
            for (int d : tr.ctors.decls) {
                const std::string& t = m.ops[d].target;
                if (p.component_of[p.sort_index(t)] != static_cast<int>(c)) continue;
                constructed.insert(t);
                if (seen_classes.insert(tr.class_of_decl[d]).second) ctor_decls.push_back(d);
            }
            std::vector<std::pair<std::string, std::string>> injections;
            for (const auto& [from, to] : tr.casts)
                if (!constructed.count(from) && constructed.count(to) &&
                    p.component_of[p.sort_index(from)] == static_cast<int>(c))
                    injections.emplace_back(from, to);

            InductionScheme scheme;
            scheme.kind_sort = kind;
            scheme.method_name = detail::lowercased(kind) + "-induction";
            std::size_t defines_before = vars.order.size();
            {
                std::set<std::string> in_use;
                scheme.conclusion_var = vars.alloc(kind, in_use);
            }

            // Obligations in emission order — constructor bases, injection
            // bases, then inductive steps — so variables are also allocated
            // in that order.
            auto recursive_positions = [&](const OpDecl& op) {
                std::vector<int> rec;
                for (std::size_t i = 0; i < op.args.size(); ++i)
                    if (p.component_of[p.sort_index(op.args[i])] == static_cast<int>(c))
                        rec.push_back(static_cast<int>(i));
                return rec;
            };
            struct ObSpec {
                int decl = -1;                            // constructor case
                std::pair<std::string, std::string> cast; // injection case
            };
            std::vector<ObSpec> specs;
            std::size_t n_bases = 0;
            for (int d : ctor_decls)
                if (recursive_positions(m.ops[d]).empty()) specs.push_back({d, {}});
            for (const auto& pr : injections) specs.push_back({-1, pr});
            n_bases = specs.size();
            for (int d : ctor_decls)
                if (!recursive_positions(m.ops[d]).empty()) specs.push_back({d, {}});

            DiagnosticBag scratch; // obligation terms are correct by construction
            auto unique_name = [&](std::string n) {
                auto used = [&](const std::string& cand) {
                    for (const auto& o : scheme.obligations)
                        if (o.name == cand) return true;
                    return false;
                };
                std::string out = n;
                for (int i = 2; used(out); ++i) out = n + "_" + std::to_string(i);
                return out;
            };
            for (const auto& spec : specs) {
                Obligation ob;
                std::set<std::string> in_use;
                if (spec.decl >= 0) {
                    const OpDecl& op = m.ops[spec.decl];
                    std::vector<int> rec = recursive_positions(op);
                    ob.inductive = !rec.empty();
                    std::vector<TermPtr> arg_vars;
                    for (const auto& s : op.args) {
                        std::string n = vars.alloc(s, in_use);
                        ob.vars.emplace_back(n, s);
                        arg_vars.push_back(make_var(n, s));
                    }
                    auto subject = make_app(op.name, arg_vars);
                    if (least_sort(subject, m, p, scratch).empty()) continue;
                    ob.concl = tr.tr_term(subject, kind, bag);
                    for (int i : rec) ob.hyps.push_back(tr.tr_term(arg_vars[i], kind, bag));
                    ob.name = unique_name((ob.inductive ? "ic_" : "basis_") +
                                          strip_underscores(op.name));
                } else {
                    const auto& [from, to] = spec.cast;
                    std::string vn;
                    for (const auto& [n, s] : m.vars)
                        if (s == from) {
                            vn = detail::lowercased(n);
                            break;
                        }
                    if (vn.empty()) vn = detail::lowercased(from);
                    std::string n = vars.alloc(from, in_use);
                    ob.vars.emplace_back(n, from);
                    TermPtr t = tr.wrap_cast(make_var(n, from), from, to);
                    if (to != kind) t = tr.wrap_cast(std::move(t), to, kind);
                    ob.concl = std::move(t);
                    ob.name = unique_name("basis_" + vn);
                }
                scheme.obligations.push_back(std::move(ob));
            }
            if (n_bases == 1 && scheme.obligations.size() == 2) {
                scheme.obligations[0].name = "basis";
                scheme.obligations[1].name = "ic";
            }
            if (vars.order.size() > defines_before) {
                DefineLine line;
                for (std::size_t i = defines_before; i < vars.order.size(); ++i) {
                    line.names.push_back(vars.order[i]);
                    line.sorts.push_back(vars.sort_of[vars.order[i]]);
                }
                th.defines.push_back(std::move(line));
            }
            th.methods.push_back(std::move(scheme));
        }
    }

    // Audits: symbol-name injectivity, declaration closure over every emitted
    // term, cast strictness, and sort agreement of equality assertions.
    {
        std::set<std::string> names;
        for (const auto& s : th.symbols)
            if (!names.insert(s.name).second)
                bag.error("mangle-collision", "generated symbol '" + s.name + "' is not unique");
        std::function<void(const TermPtr&)> check_term = [&](const TermPtr& t) {
            if (!t) return;
            if (!t->is_var && !names.count(t->name))
                bag.error("internal-audit", "assertion uses undeclared symbol '" + t->name + "'");
            for (const auto& a : t->args) check_term(a);
        };
        for (const auto& a : th.assertions) {
            check_term(a.lhs);
            check_term(a.rhs);
            for (const auto& cond : a.conditions) {
                check_term(cond.lhs);
                check_term(cond.rhs);
            }
            if (!a.is_membership_fact && a.lhs && a.rhs && a.lhs->sort != a.rhs->sort)
                bag.error("internal-audit",
                          "sides of '" + a.name + "' have different sorts: '" + a.lhs->sort +
                              "' vs '" + a.rhs->sort + "'");
        }
        for (const auto& s : th.methods)
            for (const auto& ob : s.obligations) {
                check_term(ob.concl);
                for (const auto& h : ob.hyps) check_term(h);
            }
        for (const auto& [from, to] : tr.casts)
            if (!p.strictly_less(from, to))
                bag.error("internal-audit",
                          "cast pair '" + from + "' -> '" + to + "' is not strictly increasing");
    }
    if (bag.has_errors()) return std::nullopt;
    return tr;
}

} // namespace m2a
