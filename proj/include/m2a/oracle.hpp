#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "m2a/ast.hpp"
#include "m2a/diagnostics.hpp"
#include "m2a/poset.hpp"
#include "m2a/signature.hpp"
#include "m2a/translate.hpp"

namespace m2a {

// Bounded-search budget for the equational oracle. `max_depth` caps closure
// layers per side, `max_term_size` caps generated term sizes, `max_frontier`
// caps visited states per side and doubles as the rewrite step budget.
struct OracleBudget {
    int max_depth = 4;
    int max_term_size = 40;
    int max_frontier = 100000;
    std::uint64_t seed = 0;
};

enum class Verdict { Equal, NotEqualWithinBudget, BudgetExhausted };

inline const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Equal: return "equal";
    case Verdict::NotEqualWithinBudget: return "not-equal-within-budget";
    default: return "budget-exhausted";
    }
}

struct WitnessStep {
    std::string equation;
    bool backward = false;
    TermPtr term; // term after applying the step
};

struct EqualityVerdict {
    Verdict verdict = Verdict::BudgetExhausted;
    std::vector<WitnessStep> witness; // populated for Equal
};

// One rewrite rule of either the source module or the translated theory.
struct FlatCondition {
    bool sort_test = false;
    TermPtr lhs;
    TermPtr rhs;      // equality conditions only
    std::string sort; // sort tests only
};

struct FlatEquation {
    std::string name;
    TermPtr lhs;
    TermPtr rhs;
    std::vector<FlatCondition> conditions;
    bool comm = false;       // commutativity axioms are closure-only
    bool usable = true;      // false when a condition tests membership
    bool fwd_closed = true;  // matching lhs binds all variables of rhs/conditions
    bool bwd_closed = true;  // matching rhs binds all variables of lhs/conditions
};

struct FlatTheory {
    bool order_sorted = false; // subsort matching and least-sort recomputation
    const MaudeModule* module = nullptr;
    const SortPoset* poset = nullptr;
    struct Op {
        std::string name;
        std::vector<std::string> args;
        std::string target;
    };
    std::vector<Op> ops;
    std::vector<FlatEquation> equations;
};

namespace detail {

inline std::string term_key(const Term& t) {
    std::string s;
    s.reserve(64);
    struct Walk {
        static void go(std::string& out, const Term& t) {
            if (t.is_var) {
                out += '?';
                out += t.name;
                return;
            }
            out += '(';
            out += t.name;
            for (const auto& a : t.args) {
                out += ' ';
                go(out, *a);
            }
            out += ')';
        }
    };
    Walk::go(s, t);
    return s;
}

inline int term_depth(const Term& t) {
    int d = 0;
    for (const auto& a : t.args) d = std::max(d, term_depth(*a) + 1);
    return d;
}

// Small linear-scan substitution; equation patterns bind a handful of
// variables at most.
struct Subst {
    std::vector<std::pair<const std::string*, TermPtr>> entries;

    const TermPtr* find(const std::string& n) const {
        for (const auto& e : entries)
            if (*e.first == n) return &e.second;
        return nullptr;
    }
    void bind(const std::string& n, const TermPtr& t) { entries.emplace_back(&n, t); }
};

// Syntactic matching. Order-sorted theories bind a variable to any subject
// whose least sort lies below the variable's sort; many-sorted theories
// require the exact sort.
inline bool match_term(const TermPtr& pat, const TermPtr& subj, Subst& s, const FlatTheory& th) {
    if (pat->is_var) {
        if (th.order_sorted) {
            if (!th.poset->less_eq(subj->sort, pat->sort)) return false;
        } else if (subj->sort != pat->sort) {
            return false;
        }
        if (const TermPtr* bound = s.find(pat->name)) return same_term(**bound, *subj);
        s.bind(pat->name, subj);
        return true;
    }
    if (subj->is_var || subj->name != pat->name || subj->args.size() != pat->args.size())
        return false;
    for (std::size_t i = 0; i < pat->args.size(); ++i)
        if (!match_term(pat->args[i], subj->args[i], s, th)) return false;
    return true;
}

inline TermPtr substitute(const TermPtr& t, const Subst& s) {
    if (t->is_var) {
        const TermPtr* bound = s.find(t->name);
        return bound ? *bound : t;
    }
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) args.push_back(substitute(a, s));
    auto out = make_app(t->name, std::move(args), t->span);
    out->sort = t->sort;
    out->decl_index = t->decl_index;
    return out;
}

// Re-derives least sorts after a rewrite; returns false when the rebuilt
// term cannot be sorted (it is then dropped as a closure neighbor).
inline bool resort(const TermPtr& t, const FlatTheory& th) {
    if (!th.order_sorted) return true;
    DiagnosticBag scratch;
    return !least_sort(t, *th.module, *th.poset, scratch).empty();
}

inline void collect_vars(const TermPtr& t, std::set<std::string>& out) {
    if (t->is_var) {
        out.insert(t->name);
        return;
    }
    for (const auto& a : t->args) collect_vars(a, out);
}

// A direction is usable only when matching the pattern side binds every
// variable of the produced side and of every condition; otherwise the
// rewrite would invent unbound variables.
inline bool direction_closed(const FlatEquation& eq, bool backward) {
    std::set<std::string> pattern_vars, needed;
    collect_vars(backward ? eq.rhs : eq.lhs, pattern_vars);
    collect_vars(backward ? eq.lhs : eq.rhs, needed);
    for (const auto& c : eq.conditions) {
        if (c.lhs) collect_vars(c.lhs, needed);
        if (c.rhs) collect_vars(c.rhs, needed);
    }
    for (const auto& v : needed)
        if (!pattern_vars.count(v)) return false;
    return true;
}

} // namespace detail

// Precomputes per-equation direction flags. The flatten functions call this;
// hand-assembled theories must call it before use.
inline void seal_theory(FlatTheory& th) {
    for (auto& eq : th.equations) {
        eq.fwd_closed = detail::direction_closed(eq, false);
        eq.bwd_closed = detail::direction_closed(eq, true);
    }
}

struct ReduceResult {
    TermPtr term;
    bool complete = true;
    std::vector<WitnessStep> steps;
};

namespace detail {

inline bool conditions_hold(const FlatEquation& eq, const Subst& s, const FlatTheory& th,
                            const OracleBudget& budget, int depth_left);

// One leftmost-innermost rewrite of the whole term by the oriented,
// non-commutative equations; null when `t` is in normal form. The caller
// re-derives least sorts of the returned term.
inline TermPtr one_step(const TermPtr& t, const FlatTheory& th, const OracleBudget& budget,
                        int cond_depth, std::string* used) {
    if (!t->is_var) {
        for (std::size_t i = 0; i < t->args.size(); ++i) {
            TermPtr r = one_step(t->args[i], th, budget, cond_depth, used);
            if (r) {
                std::vector<TermPtr> args = t->args;
                args[i] = std::move(r);
                auto nt = make_app(t->name, std::move(args), t->span);
                nt->sort = t->sort;
                nt->decl_index = t->decl_index;
                return nt;
            }
        }
    }
    for (const auto& eq : th.equations) {
        if (!eq.usable || eq.comm || !eq.fwd_closed) continue;
        Subst s;
        if (!match_term(eq.lhs, t, s, th)) continue;
        if (!conditions_hold(eq, s, th, budget, cond_depth)) continue;
        TermPtr next = substitute(eq.rhs, s);
        if (same_term(*next, *t)) continue;
        if (used) *used = eq.name;
        return next;
    }
    return nullptr;
}

// Normalization loop; `steps_left` is the shared rewrite budget.
inline TermPtr reduce_impl(TermPtr t, const FlatTheory& th, const OracleBudget& budget,
                           int& steps_left, std::vector<WitnessStep>* trail, int cond_depth) {
    while (steps_left > 0) {
        std::string used;
        TermPtr next = one_step(t, th, budget, cond_depth, &used);
        if (!next) break;
        if (!resort(next, th)) break;
        --steps_left;
        if (trail) trail->push_back({used, false, next});
        t = next;
    }
    return t;
}

inline bool conditions_hold(const FlatEquation& eq, const Subst& s, const FlatTheory& th,
                            const OracleBudget& budget, int depth_left) {
    if (eq.conditions.empty()) return true;
    if (depth_left <= 0) return false;
    int cond_steps = budget.max_frontier / 2 + 1;
    for (const auto& c : eq.conditions) {
        if (c.sort_test) {
            if (!th.order_sorted) return false; // membership tests never fire here
            TermPtr subj = substitute(c.lhs, s);
            if (!resort(subj, th)) return false;
            TermPtr r = reduce_impl(subj, th, budget, cond_steps, nullptr, depth_left - 1);
            if (!th.poset->less_eq(r->sort, c.sort)) return false;
        } else {
            TermPtr l = substitute(c.lhs, s);
            TermPtr r = substitute(c.rhs, s);
            if (!resort(l, th) || !resort(r, th)) return false;
            TermPtr ln = reduce_impl(l, th, budget, cond_steps, nullptr, depth_left - 1);
            TermPtr rn = reduce_impl(r, th, budget, cond_steps, nullptr, depth_left - 1);
            if (!same_term(*ln, *rn)) return false;
        }
    }
    return true;
}

// Every single-step rewrite of `t` by `eq` in the given direction, at the
// root or below, whose result stays within `size_cap`.
inline void rewrite_all(const TermPtr& t, const FlatEquation& eq, bool backward,
                        const FlatTheory& th, const OracleBudget& budget,
                        std::size_t size_cap, std::vector<TermPtr>& out) {
    if (backward ? !eq.bwd_closed : !eq.fwd_closed) return;
    const TermPtr& pat = backward ? eq.rhs : eq.lhs;
    const TermPtr& rep = backward ? eq.lhs : eq.rhs;
    Subst s;
    if (match_term(pat, t, s, th) && conditions_hold(eq, s, th, budget, 2)) {
        TermPtr next = substitute(rep, s);
        if (term_size(*next) <= size_cap && resort(next, th) && !same_term(*next, *t))
            out.push_back(next);
    }
    if (t->is_var) return;
    for (std::size_t i = 0; i < t->args.size(); ++i) {
        std::vector<TermPtr> inner;
        rewrite_all(t->args[i], eq, backward, th, budget, size_cap, inner);
        for (auto& r : inner) {
            std::vector<TermPtr> args = t->args;
            args[i] = std::move(r);
            auto nt = make_app(t->name, std::move(args), t->span);
            nt->sort = t->sort;
            nt->decl_index = t->decl_index;
            if (term_size(*nt) <= size_cap && resort(nt, th)) out.push_back(std::move(nt));
        }
    }
}

} // namespace detail

inline ReduceResult reduce(const TermPtr& t, const FlatTheory& th, const OracleBudget& budget) {
    ReduceResult r;
    int steps = budget.max_frontier;
    r.term = detail::reduce_impl(t, th, budget, steps, &r.steps, 2);
    r.complete = steps > 0;
    return r;
}

// Decides bounded equality: syntactic check, then normal-form comparison,
// then a bidirectional closure search over single rewrites in both equation
// directions. Size caps adapt to the pair so that finite neighborhoods
// exhaust and unequal pairs can be answered definitely.
inline EqualityVerdict decide_equal(const TermPtr& a, const TermPtr& b, const FlatTheory& th,
                                    const OracleBudget& budget) {
    EqualityVerdict out;
    if (same_term(*a, *b)) {
        out.verdict = Verdict::Equal;
        return out;
    }
    ReduceResult ra = reduce(a, th, budget);
    ReduceResult rb = reduce(b, th, budget);
    if (same_term(*ra.term, *rb.term)) {
        out.verdict = Verdict::Equal;
        out.witness = ra.steps;
        // Reverse b's reduction: each undone step lands on the previous term.
        for (std::size_t i = rb.steps.size(); i-- > 0;) {
            WitnessStep st;
            st.equation = rb.steps[i].equation;
            st.backward = true;
            st.term = i == 0 ? b : rb.steps[i - 1].term;
            out.witness.push_back(std::move(st));
        }
        return out;
    }

    const std::size_t size_cap = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(budget.max_term_size, 1)),
        std::max(term_size(*ra.term), term_size(*rb.term)) + 2);

    struct Parent {
        std::string parent_key;
        std::string equation;
        bool backward = false;
        TermPtr term;
    };
    struct Side {
        std::map<std::string, Parent> visited;
        std::deque<TermPtr> frontier;
        bool exhausted = false;
    };
    Side sides[2];
    sides[0].visited[detail::term_key(*ra.term)] = {"", "", false, ra.term};
    sides[0].frontier.push_back(ra.term);
    sides[1].visited[detail::term_key(*rb.term)] = {"", "", false, rb.term};
    sides[1].frontier.push_back(rb.term);

    std::string meet;
    bool over_budget = !ra.complete || !rb.complete;
    auto expand_layer = [&](Side& self, const Side& other) {
        std::deque<TermPtr> next;
        while (!self.frontier.empty()) {
            TermPtr cur = self.frontier.front();
            self.frontier.pop_front();
            std::string cur_key = detail::term_key(*cur);
            for (const auto& eq : th.equations) {
                if (!eq.usable) continue;
                for (bool backward : {false, true}) {
                    if (backward ? !eq.bwd_closed : !eq.fwd_closed) continue;
                    std::vector<TermPtr> neigh;
                    detail::rewrite_all(cur, eq, backward, th, budget, size_cap, neigh);
                    for (auto& n : neigh) {
                        std::string k = detail::term_key(*n);
                        if (self.visited.count(k)) continue;
                        if (self.visited.size() >=
                            static_cast<std::size_t>(budget.max_frontier)) {
                            over_budget = true;
                            return;
                        }
                        self.visited[k] = {cur_key, eq.name, backward, n};
                        next.push_back(n);
                        if (other.visited.count(k) && meet.empty()) meet = k;
                    }
                }
            }
        }
        self.frontier = std::move(next);
        if (self.frontier.empty()) self.exhausted = true;
    };

    for (int layer = 0; layer < budget.max_depth && meet.empty(); ++layer) {
        bool progressed = false;
        for (int s = 0; s < 2 && meet.empty(); ++s) {
            if (sides[s].exhausted || over_budget) continue;
            expand_layer(sides[s], sides[1 - s]);
            progressed = true;
        }
        if (sides[0].exhausted && sides[1].exhausted) break;
        if (!progressed || over_budget) break;
    }

    if (meet.empty()) {
        if (!over_budget && sides[0].exhausted && sides[1].exhausted)
            out.verdict = Verdict::NotEqualWithinBudget;
        else
            out.verdict = Verdict::BudgetExhausted;
        return out;
    }

    // Stitch the witness: a -> ra -> meet -> rb -> b.
    out.verdict = Verdict::Equal;
    out.witness = ra.steps;
    std::vector<WitnessStep> left;
    for (std::string k = meet; !sides[0].visited[k].parent_key.empty();
         k = sides[0].visited[k].parent_key) {
        const Parent& pr = sides[0].visited[k];
        left.push_back({pr.equation, pr.backward, pr.term});
    }
    for (auto it = left.rbegin(); it != left.rend(); ++it) out.witness.push_back(*it);
    for (std::string k = meet; !sides[1].visited[k].parent_key.empty();
         k = sides[1].visited[k].parent_key) {
        const Parent& pr = sides[1].visited[k];
        WitnessStep st;
        st.equation = pr.equation;
        st.backward = !pr.backward;
        st.term = sides[1].visited[pr.parent_key].term;
        out.witness.push_back(std::move(st));
    }
    for (std::size_t i = rb.steps.size(); i-- > 0;) {
        WitnessStep st;
        st.equation = rb.steps[i].equation;
        st.backward = true;
        st.term = i == 0 ? b : rb.steps[i - 1].term;
        out.witness.push_back(std::move(st));
    }
    return out;
}

// Re-derives a witness chain step by step; each step must be a single
// application of the named equation in the recorded direction.
inline bool replay_witness(const TermPtr& a, const TermPtr& b,
                           const std::vector<WitnessStep>& witness, const FlatTheory& th,
                           const OracleBudget& budget) {
    TermPtr cur = a;
    for (const auto& st : witness) {
        const FlatEquation* eq = nullptr;
        for (const auto& e : th.equations)
            if (e.name == st.equation) eq = &e;
        if (!eq) return false;
        std::vector<TermPtr> cand;
        detail::rewrite_all(cur, *eq, st.backward, th, budget,
                            static_cast<std::size_t>(budget.max_term_size) * 4, cand);
        bool found = false;
        for (const auto& c : cand)
            if (same_term(*c, *st.term)) found = true;
        if (!found) return false;
        cur = st.term;
    }
    return same_term(*cur, *b);
}

inline FlatTheory flatten_source(const MaudeModule& m, const SortPoset& p) {
    FlatTheory th;
    th.order_sorted = true;
    th.module = &m;
    th.poset = &p;
    for (const auto& op : m.ops) th.ops.push_back({op.name, op.args, op.target});
    DiagnosticBag scratch;
    auto sorted = [&](const TermPtr& t) {
        least_sort(t, m, p, scratch);
        return t;
    };
    int n = 0;
    for (const auto& eq : m.equations) {
        FlatEquation f;
        f.name = "eq_" + std::to_string(++n);
        f.lhs = sorted(eq.lhs);
        f.rhs = sorted(eq.rhs);
        for (const auto& c : eq.condition) {
            FlatCondition fc;
            fc.sort_test = c.kind == ConditionFragment::Kind::SortTest;
            fc.lhs = sorted(c.lhs);
            if (c.rhs) fc.rhs = sorted(c.rhs);
            fc.sort = c.sort;
            f.conditions.push_back(std::move(fc));
        }
        th.equations.push_back(std::move(f));
    }
    // Structural axioms as explicit equations over fresh variables.
    for (const auto& op : m.ops) {
        if (!(op.assoc || op.comm || op.has_id) || op.args.size() != 2) continue;
        std::string base = strip_underscores(op.name);
        auto v = [&](const char* nm) { return make_var(nm, op.args[0]); };
        auto app2 = [&](TermPtr a, TermPtr b) {
            auto t = make_app(op.name, {std::move(a), std::move(b)});
            t->sort = op.target;
            return t;
        };
        if (op.assoc) {
            FlatEquation f;
            f.name = "assoc_" + base;
            f.lhs = app2(app2(v("_a"), v("_b")), v("_c"));
            f.rhs = app2(v("_a"), app2(v("_b"), v("_c")));
            th.equations.push_back(std::move(f));
        }
        if (op.comm) {
            FlatEquation f;
            f.name = "comm_" + base;
            f.comm = true;
            f.lhs = app2(v("_a"), v("_b"));
            f.rhs = app2(v("_b"), v("_a"));
            th.equations.push_back(std::move(f));
        }
        if (op.has_id && op.id_term) {
            FlatEquation fl;
            fl.name = "left_id_" + base;
            fl.lhs = app2(op.id_term, v("_a"));
            fl.rhs = v("_a");
            th.equations.push_back(std::move(fl));
            FlatEquation fr;
            fr.name = "right_id_" + base;
            fr.lhs = app2(v("_a"), op.id_term);
            fr.rhs = v("_a");
            th.equations.push_back(std::move(fr));
        }
    }
    seal_theory(th);
    return th;
}

inline FlatTheory flatten_target(const TranslatedTheory& theory) {
    FlatTheory th;
    th.order_sorted = false;
    for (const auto& s : theory.symbols)
        if (s.role != SymbolRole::Predicate) th.ops.push_back({s.name, s.args, s.target});
    for (const auto& a : theory.assertions) {
        if (a.is_membership_fact) continue;
        FlatEquation f;
        f.name = a.name;
        f.lhs = a.lhs;
        f.rhs = a.rhs;
        f.comm = a.name.rfind("comm_", 0) == 0;
        for (const auto& c : a.conditions) {
            if (c.is_membership) f.usable = false;
            FlatCondition fc;
            fc.sort_test = c.is_membership;
            fc.lhs = c.lhs;
            fc.rhs = c.rhs;
            fc.sort = c.sort;
            f.conditions.push_back(std::move(fc));
        }
        th.equations.push_back(std::move(f));
    }
    seal_theory(th);
    return th;
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace detail

// Deterministic sampler of distinct ground terms of (at most) the given
// derivation depth: constants have depth 0, an application adds one level.
inline std::vector<TermPtr> sample_ground_terms(const FlatTheory& th, const std::string& sort,
                                                int depth, int count, std::uint64_t seed,
                                                DiagnosticBag& bag) {
    std::vector<TermPtr> out;
    if (count <= 0) return out;
    // Minimal derivation depth per operator, by fixpoint iteration.
    const int kInf = 1 << 20;
    std::map<std::string, int> sort_depth;
    auto sd = [&](const std::string& s) {
        auto it = sort_depth.find(s);
        return it == sort_depth.end() ? kInf : it->second;
    };
    auto fits = [&](const std::string& target, const std::string& s) {
        return th.order_sorted ? th.poset->less_eq(target, s) : target == s;
    };
    std::vector<int> op_depth(th.ops.size(), kInf);
    std::vector<std::string> all_sorts;
    if (th.order_sorted)
        all_sorts = th.poset->sorts;
    else
        for (const auto& op : th.ops) all_sorts.push_back(op.target);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < th.ops.size(); ++i) {
            int d = 0;
            for (const auto& a : th.ops[i].args) d = std::max(d, sd(a) == kInf ? kInf : sd(a) + 1);
            if (d < op_depth[i]) {
                op_depth[i] = d;
                changed = true;
            }
            if (d < kInf) {
                // Propagate to every sort this operator can inhabit.
                for (const auto& s : all_sorts)
                    if (fits(th.ops[i].target, s) && d < sd(s)) {
                        sort_depth[s] = d;
                        changed = true;
                    }
            }
        }
    }
    if (sd(sort) > depth) {
        bag.error("uninhabited-sort", "no ground term of sort '" + sort + "' exists within depth " +
                                          std::to_string(depth));
        return out;
    }

    std::mt19937_64 rng(seed ^ detail::fnv1a(sort));
    std::function<TermPtr(const std::string&, int)> gen = [&](const std::string& s,
                                                              int remaining) -> TermPtr {
        std::vector<std::size_t> cands;
        for (std::size_t i = 0; i < th.ops.size(); ++i)
            if (fits(th.ops[i].target, s) && op_depth[i] <= remaining) cands.push_back(i);
        if (cands.empty()) return nullptr;
        const auto& op = th.ops[cands[rng() % cands.size()]];
        std::vector<TermPtr> args;
        for (const auto& a : op.args) {
            TermPtr sub = gen(a, remaining - 1);
            if (!sub) return nullptr;
            args.push_back(std::move(sub));
        }
        auto t = make_app(op.name, std::move(args));
        t->sort = op.target;
        return t;
    };

    std::set<std::string> seen;
    for (int attempt = 0; attempt < count * 32 && static_cast<int>(out.size()) < count;
         ++attempt) {
        TermPtr t = gen(sort, depth);
        if (!t) continue;
        if (th.order_sorted) {
            DiagnosticBag scratch;
            if (least_sort(t, *th.module, *th.poset, scratch).empty()) continue;
        }
        if (seen.insert(detail::term_key(*t)).second) out.push_back(std::move(t));
    }
    return out;
}

// All ground constructor terms whose least sort lies in the component, up to
// the given derivation depth (constants have depth 0).
inline std::vector<TermPtr> enumerate_constructor_terms(const MaudeModule& m, const SortPoset& p,
                                                        const ConstructorInfo& ctors,
                                                        int component, int depth) {
    std::vector<TermPtr> all; // every constructor term of any component, by depth
    std::set<std::string> seen;
    for (int d = 0; d <= depth; ++d) {
        for (int decl : ctors.decls) {
            const OpDecl& op = m.ops[decl];
            if (op.args.empty() != (d == 0)) continue; // constants exactly at depth 0
            std::vector<std::vector<TermPtr>> choices;
            bool ok = true;
            for (const auto& a : op.args) {
                std::vector<TermPtr> ch;
                for (const auto& t : all)
                    if (p.less_eq(t->sort, a) && detail::term_depth(*t) <= d - 1)
                        ch.push_back(t);
                if (ch.empty()) ok = false;
                choices.push_back(std::move(ch));
            }
            if (!ok) continue;
            std::vector<std::size_t> idx(choices.size(), 0);
            while (true) {
                std::vector<TermPtr> args;
                for (std::size_t i = 0; i < choices.size(); ++i) args.push_back(choices[i][idx[i]]);
                auto t = make_app(op.name, std::move(args));
                DiagnosticBag scratch;
                if (!least_sort(t, m, p, scratch).empty() && detail::term_depth(*t) == d &&
                    seen.insert(detail::term_key(*t)).second)
                    all.push_back(t);
                std::size_t k = 0;
                for (; k < idx.size(); ++k) {
                    if (++idx[k] < choices[k].size()) break;
                    idx[k] = 0;
                }
                if (k == idx.size()) break;
            }
        }
    }
    std::vector<TermPtr> out;
    for (const auto& t : all) {
        int s = p.sort_index(t->sort);
        if (s >= 0 && p.component_of[s] == component) out.push_back(t);
    }
    return out;
}

// One sampled pair judged on both sides of the translation.
struct PairOutcome {
    TermPtr lhs;
    TermPtr rhs;
    Verdict source = Verdict::BudgetExhausted;
    Verdict target = Verdict::BudgetExhausted;

    bool conclusive() const {
        return source != Verdict::BudgetExhausted && target != Verdict::BudgetExhausted;
    }
    bool agree() const { return (source == Verdict::Equal) == (target == Verdict::Equal); }
};

struct KindReport {
    std::string kind;
    int pairs = 0;
    int agreements = 0;
    int disagreements = 0;
    int inconclusive = 0;
    std::vector<PairOutcome> outcomes;
};

struct VerifyReport {
    std::vector<KindReport> kinds;
    int pairs = 0;
    int agreements = 0;
    int disagreements = 0;
    int inconclusive = 0;

    bool ok() const { return disagreements == 0; }
};

// Property check of the translation: sampled ground pairs must receive the
// same conclusive equality verdict under the source equations and under the
// translated assertions. Sampling happens at each kind's top sort so that
// pairs may mix sorts of the component.
inline VerifyReport verify_equivalence(const Translation& tr, const OracleBudget& budget,
                                       int pairs_per_kind, int sample_depth = 4) {
    VerifyReport report;
    FlatTheory src = flatten_source(tr.module, tr.poset);
    FlatTheory tgt = flatten_target(tr.theory);
    for (std::size_t c = 0; c < tr.poset.components.size(); ++c) {
        KindReport kr;
        kr.kind = tr.poset.kind_name(static_cast<int>(c));
        DiagnosticBag scratch;
        auto terms = sample_ground_terms(src, kr.kind, sample_depth, 2 * pairs_per_kind,
                                         budget.seed, scratch);
        if (terms.size() >= 2) {
            for (int i = 0; i < pairs_per_kind; ++i) {
                PairOutcome po;
                po.lhs = terms[(2 * i) % terms.size()];
                po.rhs = terms[(2 * i + 1) % terms.size()];
                po.source = decide_equal(po.lhs, po.rhs, src, budget).verdict;
                DiagnosticBag tb;
                TermPtr ta = tr.tr_term(po.lhs, kr.kind, tb);
                TermPtr tb2 = tr.tr_term(po.rhs, kr.kind, tb);
                if (ta && tb2 && !tb.has_errors())
                    po.target = decide_equal(ta, tb2, tgt, budget).verdict;
                kr.outcomes.push_back(po);
                ++kr.pairs;
                if (!po.conclusive())
                    ++kr.inconclusive;
                else if (po.agree())
                    ++kr.agreements;
                else
                    ++kr.disagreements;
            }
        }
        report.pairs += kr.pairs;
        report.agreements += kr.agreements;
        report.disagreements += kr.disagreements;
        report.inconclusive += kr.inconclusive;
        report.kinds.push_back(std::move(kr));
    }
    return report;
}

struct ExhaustivenessReport {
    int component = -1;
    std::string kind;
    int terms = 0;
    std::vector<std::string> uncovered;

    bool ok() const { return uncovered.empty(); }
};

// Audits that every ground constructor term of the component, up to the
// depth, has a least sort that is either directly targeted by a constructor
// or carried into one by a cast — i.e. the constructor family extended with
// the injections is jointly exhaustive over the enumerated fragment.
inline ExhaustivenessReport check_joint_exhaustiveness(const Translation& tr, int component,
                                                       int depth) {
    ExhaustivenessReport rep;
    rep.component = component;
    rep.kind = tr.poset.kind_name(component);
    std::set<std::string> targeted;
    for (int d : tr.ctors.decls) {
        const OpDecl& op = tr.module.ops[d];
        int si = tr.poset.sort_index(op.target);
        if (si >= 0 && tr.poset.component_of[si] == component) targeted.insert(op.target);
    }
    auto covered = [&](const std::string& s) {
        if (targeted.count(s)) return true;
        for (const auto& [from, to] : tr.casts)
            if (from == s && targeted.count(to)) return true;
        return false;
    };
    auto terms = enumerate_constructor_terms(tr.module, tr.poset, tr.ctors, component, depth);
    rep.terms = static_cast<int>(terms.size());
    for (const auto& t : terms)
        if (!covered(t->sort)) rep.uncovered.push_back(detail::term_key(*t));
    return rep;
}

} // namespace m2a
