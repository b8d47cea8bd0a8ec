#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "m2a/ast.hpp"
#include "m2a/builtins.hpp"
#include "m2a/diagnostics.hpp"
#include "m2a/poset.hpp"
#include "m2a/pretty.hpp"
#include "m2a/signature.hpp"
#include "m2a/token.hpp"

namespace m2a {

// Resolves mixfix/prefix token ranges into term trees by enumerating every
// parse (bounded backtracking), filtering sort-incorrect candidates, and
// right-associating same-operator chains. Cross-operator ambiguity is an
// error; the caller must parenthesize.
class MixfixParser {
public:
    MixfixParser(const std::vector<Token>& toks, const MaudeModule& m, const SortPoset& p,
                 DiagnosticBag& bag)
        : toks_(toks), m_(m), p_(p), bag_(bag) {}

    TermPtr parse(std::size_t lo, std::size_t hi) {
        memo_.clear();
        expansions_ = 0;
        budget_exceeded_ = false;
        furthest_ = lo;
        if (lo >= hi) {
            bag_.error("syntax-error", "expected a term", span_of(lo, hi));
            return nullptr;
        }
        compute_depths(lo, hi);
        std::vector<TermPtr> cands = parse_range(lo, hi);
        if (budget_exceeded_) {
            bag_.error("mixfix-budget",
                       "mixfix backtracking budget exceeded; add parentheses", span_of(lo, hi));
            return nullptr;
        }
        if (cands.empty()) {
            if (hi - lo == 1) {
                bag_.error("unknown-identifier",
                           "'" + toks_[lo].text + "' is neither a declared variable nor an operator",
                           toks_[lo].span);
            } else {
                std::size_t at = std::min(furthest_, hi - 1);
                bag_.error("no-parse",
                           "cannot parse term; no operator template matches past '" +
                               toks_[at].text + "'",
                           toks_[at].span);
            }
            return nullptr;
        }
        if (cands.size() == 1) return cands.front();

        // Same-operator chains re-associate to the right instead of erroring.
        if (TermPtr r = right_associated(cands)) return r;

        std::string listing;
        for (const auto& c : cands) listing += "\n  " + print_term(*c);
        bag_.error("ambiguous-parse",
                   "ambiguous term; parenthesize to pick one of:" + listing, span_of(lo, hi));
        return nullptr;
    }

private:
    static constexpr std::size_t kBudget = 200000;

    const std::vector<Token>& toks_;
    const MaudeModule& m_;
    const SortPoset& p_;
    DiagnosticBag& bag_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<TermPtr>> memo_;
    std::vector<int> depth_;   // depth_[i]: paren depth before token i
    std::size_t depth_base_ = 0;
    std::size_t expansions_ = 0;
    bool budget_exceeded_ = false;
    std::size_t furthest_ = 0;

    Span span_of(std::size_t lo, std::size_t hi) const {
        if (lo >= toks_.size()) return toks_.empty() ? Span{} : toks_.back().span;
        Span s = toks_[lo].span;
        if (hi > lo && hi <= toks_.size()) s.end = toks_[hi - 1].span.end;
        return s;
    }

    void compute_depths(std::size_t lo, std::size_t hi) {
        depth_base_ = lo;
        depth_.assign(hi - lo + 1, 0);
        for (std::size_t i = lo; i < hi; ++i) {
            int d = depth_[i - lo];
            if (toks_[i].text == "(")
                d += 1;
            else if (toks_[i].text == ")")
                d -= 1;
            depth_[i - lo + 1] = d;
        }
    }
    int depth_at(std::size_t pos) const { return depth_[pos - depth_base_]; }
    bool balanced(std::size_t lo, std::size_t hi) const {
        if (depth_at(lo) != depth_at(hi)) return false;
        for (std::size_t i = lo; i < hi; ++i)
            if (depth_at(i + 1) < depth_at(lo) || depth_at(i) < depth_at(lo)) return false;
        return true;
    }

    // Least target among declarations applicable to the argument sorts; the
    // candidate is kept whenever at least one declaration applies. A missing
    // least element survives here and is reported by least_sort later.
    TermPtr resolve_app(const std::string& name, std::vector<TermPtr> args, Span span) {
        int best = -1;
        for (int i = 0; i < static_cast<int>(m_.ops.size()); ++i) {
            const OpDecl& op = m_.ops[i];
            if (op.name != name || op.args.size() != args.size()) continue;
            bool ok = true;
            for (std::size_t k = 0; k < args.size() && ok; ++k)
                ok = p_.less_eq(args[k]->sort, op.args[k]);
            if (!ok) continue;
            if (best < 0 || p_.strictly_less(op.target, m_.ops[best].target)) best = i;
        }
        if (best < 0) return nullptr;
        TermPtr t = make_app(name, std::move(args), span);
        t->sort = m_.ops[best].target;
        t->decl_index = best;
        return t;
    }

    void add_candidate(std::vector<TermPtr>& out, TermPtr t) {
        if (!t) return;
        for (const auto& c : out)
            if (same_term(*c, *t)) return;
        out.push_back(std::move(t));
    }

    const std::vector<TermPtr>& parse_range(std::size_t lo, std::size_t hi) {
        auto key = std::make_pair(lo, hi);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        auto& slot = memo_[key];   // inserted first: recursion on same range sees empty
        if (++expansions_ > kBudget) {
            budget_exceeded_ = true;
            return slot;
        }
        if (lo >= hi || !balanced(lo, hi)) return slot;
        std::vector<TermPtr> cands;

        if (hi - lo == 1) {
            const Token& t = toks_[lo];
            if (const std::string* vs = m_.var_sort(t.text))
                add_candidate(cands, make_var(t.text, *vs, t.span));
            add_candidate(cands, resolve_app(t.text, {}, t.span));
            if (cands.empty()) furthest_ = std::max(furthest_, lo);
            slot = std::move(cands);
            return memo_[key];
        }

        // Parenthesized group spanning the whole range.
        if (toks_[lo].text == "(" && toks_[hi - 1].text == ")" && balanced(lo + 1, hi - 1)) {
            for (const auto& c : parse_range(lo + 1, hi - 1)) add_candidate(cands, c);
        }

        // Prefix application name(a1, ..., an).
        if (hi - lo >= 3 && toks_[lo + 1].text == "(" && toks_[hi - 1].text == ")" &&
            mixfix_arity(toks_[lo].text) == 0 && toks_[lo].text != "(" &&
            balanced(lo + 2, hi - 1)) {
            parse_prefix_call(lo, hi, cands);
        }

        // Mixfix templates.
        std::vector<std::pair<std::string, std::size_t>> tried;
        for (const auto& op : m_.ops) {
            std::size_t slots = mixfix_arity(op.name);
            if (slots == 0 || slots != op.args.size()) continue;
            bool seen = false;
            for (const auto& [n, a] : tried) seen = seen || (n == op.name && a == slots);
            if (seen) continue;
            tried.emplace_back(op.name, slots);
            match_template(op.name, lo, hi, cands);
        }

        slot = std::move(cands);
        return memo_[key];
    }

    void parse_prefix_call(std::size_t lo, std::size_t hi, std::vector<TermPtr>& cands) {
        const std::string& name = toks_[lo].text;
        bool has_decl = false;
        for (const auto& op : m_.ops) has_decl = has_decl || (op.name == name && !op.args.empty());
        if (!has_decl) return;

        std::vector<std::pair<std::size_t, std::size_t>> parts;
        std::size_t start = lo + 2;
        if (start >= hi - 1) return;   // name() with no arguments is not a term
        for (std::size_t i = start; i < hi - 1; ++i) {
            if (toks_[i].text == "," && depth_at(i) == depth_at(start)) {
                parts.emplace_back(start, i);
                start = i + 1;
            }
        }
        parts.emplace_back(start, hi - 1);
        for (const auto& [a, b] : parts)
            if (a >= b) return;

        bool arity_ok = false;
        for (const auto& op : m_.ops)
            arity_ok = arity_ok || (op.name == name && op.args.size() == parts.size());
        if (!arity_ok) {
            furthest_ = std::max(furthest_, lo);
            return;
        }
        std::vector<std::vector<TermPtr>> arg_cands;
        for (const auto& [a, b] : parts) {
            arg_cands.push_back(parse_range(a, b));
            if (arg_cands.back().empty()) return;
        }
        std::vector<TermPtr> combo(parts.size());
        product(arg_cands, 0, combo, [&](const std::vector<TermPtr>& args) {
            add_candidate(cands, resolve_app(name, args, span_of(lo, hi)));
        });
    }

    template <typename F>
    void product(const std::vector<std::vector<TermPtr>>& sets, std::size_t i,
                 std::vector<TermPtr>& combo, F&& emit) {
        if (++expansions_ > kBudget) {
            budget_exceeded_ = true;
            return;
        }
        if (i == sets.size()) {
            emit(combo);
            return;
        }
        for (const auto& c : sets[i]) {
            combo[i] = c;
            product(sets, i + 1, combo, emit);
        }
    }

    struct TemplateElem {
        bool literal;
        std::string text;
    };

    static std::vector<TemplateElem> split_template(const std::string& name) {
        std::vector<TemplateElem> elems;
        std::string lit;
        for (char c : name) {
            if (c == '_') {
                if (!lit.empty()) {
                    elems.push_back({true, lit});
                    lit.clear();
                }
                elems.push_back({false, ""});
            } else {
                lit.push_back(c);
            }
        }
        if (!lit.empty()) elems.push_back({true, lit});
        return elems;
    }

    void match_template(const std::string& name, std::size_t lo, std::size_t hi,
                        std::vector<TermPtr>& cands) {
        std::vector<TemplateElem> elems = split_template(name);
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        match_elems(name, elems, 0, lo, lo, hi, slots, cands);
    }

    void match_elems(const std::string& name, const std::vector<TemplateElem>& elems,
                     std::size_t ei, std::size_t pos, std::size_t lo, std::size_t hi,
                     std::vector<std::pair<std::size_t, std::size_t>>& slots,
                     std::vector<TermPtr>& cands) {
        if (++expansions_ > kBudget) {
            budget_exceeded_ = true;
            return;
        }
        if (ei == elems.size()) {
            if (pos != hi) return;
            std::vector<std::vector<TermPtr>> arg_cands;
            for (const auto& [a, b] : slots) {
                arg_cands.push_back(parse_range(a, b));
                if (arg_cands.back().empty()) return;
            }
            std::vector<TermPtr> combo(slots.size());
            product(arg_cands, 0, combo, [&](const std::vector<TermPtr>& args) {
                add_candidate(cands, resolve_app(name, args, span_of(lo, hi)));
            });
            return;
        }
        if (pos >= hi) return;
        const TemplateElem& e = elems[ei];
        if (e.literal) {
            if (toks_[pos].text == e.text && depth_at(pos) == depth_at(lo)) {
                match_elems(name, elems, ei + 1, pos + 1, lo, hi, slots, cands);
            } else {
                furthest_ = std::max(furthest_, pos);
            }
            return;
        }
        // Slot: try every balanced, nonempty extent. When the next element is
        // a literal, only extents ending right before one of its occurrences.
        if (ei + 1 == elems.size()) {
            if (balanced(pos, hi)) {
                slots.emplace_back(pos, hi);
                match_elems(name, elems, ei + 1, hi, lo, hi, slots, cands);
                slots.pop_back();
            }
            return;
        }
        if (elems[ei + 1].literal) {
            for (std::size_t end = pos + 1; end < hi; ++end) {
                if (toks_[end].text == elems[ei + 1].text && depth_at(end) == depth_at(lo) &&
                    balanced(pos, end)) {
                    slots.emplace_back(pos, end);
                    match_elems(name, elems, ei + 1, end, lo, hi, slots, cands);
                    slots.pop_back();
                }
            }
            return;
        }
        for (std::size_t end = pos + 1; end < hi; ++end) {
            if (!balanced(pos, end)) continue;
            slots.emplace_back(pos, end);
            match_elems(name, elems, ei + 1, end, lo, hi, slots, cands);
            slots.pop_back();
        }
    }

    static void flatten(const TermPtr& t, const std::string& op, std::vector<TermPtr>& out) {
        if (!t->is_var && t->name == op && t->args.size() == 2) {
            flatten(t->args[0], op, out);
            flatten(t->args[1], op, out);
        } else {
            out.push_back(t);
        }
    }

    TermPtr right_associated(const std::vector<TermPtr>& cands) {
        const TermPtr& first = cands.front();
        if (first->is_var || first->args.size() != 2) return nullptr;
        const std::string& op = first->name;
        std::vector<std::vector<TermPtr>> leaves(cands.size());
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (cands[i]->is_var || cands[i]->name != op || cands[i]->args.size() != 2)
                return nullptr;
            flatten(cands[i], op, leaves[i]);
            if (leaves[i].size() != leaves[0].size()) return nullptr;
            for (std::size_t k = 0; k < leaves[i].size(); ++k)
                if (!same_term(*leaves[i][k], *leaves[0][k])) return nullptr;
        }
        // Right-nested rebuild over the common leaf sequence.
        TermPtr acc = leaves[0].back();
        for (std::size_t k = leaves[0].size() - 1; k-- > 0;) {
            acc = resolve_app(op, {leaves[0][k], acc}, leaves[0][k]->span);
            if (!acc) return nullptr;
        }
        for (const auto& c : cands)
            if (same_term(*c, *acc)) return c;
        // Explicit parentheses produced a grouping the right-nested rebuild
        // does not reproduce; report the ambiguity instead of regrouping.
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Module parser: two phases. Phase one records declarations and raw token
// ranges of every term; phase two (once operators, variables, and imports
// are all known) resolves the ranges with the mixfix parser and validates.
// ---------------------------------------------------------------------------

class ModuleParser {
public:
    ModuleParser(const std::vector<Token>& toks, DiagnosticBag& bag, bool builtins = true)
        : toks_(toks), bag_(bag), builtins_(builtins) {}

    // Parses one module starting at `pos` (which must be at a `fmod`).
    std::optional<MaudeModule> parse_module(std::size_t& pos) {
        MaudeModule m;
        pending_eqs_.clear();
        pending_mbs_.clear();
        pending_ids_.clear();

        if (!expect_keyword(pos, "fmod")) return std::nullopt;
        if (!at(pos) || toks_[pos].kind == TokenKind::Keyword) {
            syntax_error(pos, "module name");
            return std::nullopt;
        }
        m.name = toks_[pos++].text;
        if (!expect_keyword(pos, "is")) return std::nullopt;

        std::vector<std::string> numerals = scan_numerals(pos);

        while (at(pos) && !is_kw(pos, "endfm")) {
            const Token& t = toks_[pos];
            if (is_kw(pos, "protecting")) {
                parse_protecting(pos, m, numerals);
            } else if (is_kw(pos, "sort") || is_kw(pos, "sorts")) {
                parse_sorts(pos, m);
            } else if (is_kw(pos, "subsort") || is_kw(pos, "subsorts")) {
                parse_subsorts(pos, m);
            } else if (is_kw(pos, "op") || is_kw(pos, "ops")) {
                parse_ops(pos, m);
            } else if (is_kw(pos, "var") || is_kw(pos, "vars")) {
                parse_vars(pos, m);
            } else if (is_kw(pos, "eq") || is_kw(pos, "ceq")) {
                parse_eq(pos);
            } else if (is_kw(pos, "mb") || is_kw(pos, "cmb")) {
                parse_mb(pos);
            } else {
                bag_.error("unsupported-feature",
                           "unsupported construct '" + t.text + "' in functional module", t.span);
                skip_statement(pos);
            }
        }
        if (!expect_keyword(pos, "endfm")) return std::nullopt;

        resolve_terms(m);
        return m;
    }

    // Parses every module in the token stream.
    std::vector<MaudeModule> parse_file() {
        std::vector<MaudeModule> out;
        std::size_t pos = 0;
        while (pos < toks_.size()) {
            if (!is_kw(pos, "fmod")) {
                syntax_error(pos, "'fmod'");
                break;
            }
            auto m = parse_module(pos);
            if (!m) break;
            out.push_back(std::move(*m));
        }
        return out;
    }

private:
    struct PendingEq {
        std::size_t lhs_lo, lhs_hi, rhs_lo, rhs_hi;
        std::vector<std::pair<std::size_t, std::size_t>> cond;
        Span span;
    };
    struct PendingMb {
        std::size_t subj_lo, subj_hi;
        std::string sort;
        std::vector<std::pair<std::size_t, std::size_t>> cond;
        Span span;
    };

    const std::vector<Token>& toks_;
    DiagnosticBag& bag_;
    bool builtins_ = true;
    std::vector<PendingEq> pending_eqs_;
    std::vector<PendingMb> pending_mbs_;
    std::vector<int> pending_ids_;   // indices into m.ops whose id term awaits parsing

    bool at(std::size_t pos) const { return pos < toks_.size(); }
    bool is_kw(std::size_t pos, const char* kw) const {
        return at(pos) && toks_[pos].kind == TokenKind::Keyword && toks_[pos].text == kw;
    }
    bool is_text(std::size_t pos, const char* s) const { return at(pos) && toks_[pos].text == s; }

    void syntax_error(std::size_t pos, const std::string& expected) {
        Span sp = at(pos) ? toks_[pos].span : (toks_.empty() ? Span{} : toks_.back().span);
        std::string got = at(pos) ? "'" + toks_[pos].text + "'" : "end of input";
        bag_.error("syntax-error", "expected " + expected + ", found " + got, sp);
    }

    bool expect_keyword(std::size_t& pos, const char* kw) {
        if (is_kw(pos, kw)) {
            ++pos;
            return true;
        }
        syntax_error(pos, std::string("'") + kw + "'");
        return false;
    }

    bool expect_dot(std::size_t& pos) {
        if (is_text(pos, ".")) {
            ++pos;
            return true;
        }
        syntax_error(pos, "'.'");
        skip_statement(pos);
        return false;
    }

    void skip_statement(std::size_t& pos) {
        while (at(pos) && !is_text(pos, ".") && !is_kw(pos, "endfm")) ++pos;
        if (is_text(pos, ".")) ++pos;
    }

    std::vector<std::string> scan_numerals(std::size_t from) const {
        std::vector<std::string> out;
        for (std::size_t i = from; i < toks_.size(); ++i) {
            if (toks_[i].kind == TokenKind::Keyword &&
                (toks_[i].text == "endfm" || toks_[i].text == "fmod"))
                break;
            if (builtins::is_numeral(toks_[i].text)) {
                bool dup = false;
                for (const auto& n : out) dup = dup || n == toks_[i].text;
                if (!dup) out.push_back(toks_[i].text);
            }
        }
        return out;
    }

    void parse_protecting(std::size_t& pos, MaudeModule& m, const std::vector<std::string>& numerals) {
        ++pos;
        if (!at(pos) || toks_[pos].kind == TokenKind::Keyword) {
            syntax_error(pos, "module name");
            skip_statement(pos);
            return;
        }
        std::string name = toks_[pos++].text;
        m.imports.push_back(name);
        if (builtins_)
            builtins::splice(m, name, numerals, bag_);
        else
            bag_.error("unsupported-import",
                       "import of '" + name + "' requires the built-in module stubs, "
                       "which are disabled",
                       toks_[pos - 1].span);
        expect_dot(pos);
    }

    void parse_sorts(std::size_t& pos, MaudeModule& m) {
        ++pos;
        bool any = false;
        while (at(pos) && !is_text(pos, ".") && toks_[pos].kind != TokenKind::Keyword) {
            const Token& t = toks_[pos];
            if (m.has_sort(t.text))
                bag_.warning("duplicate-sort", "sort '" + t.text + "' is already declared", t.span);
            else
                m.sorts.push_back(t.text);
            any = true;
            ++pos;
        }
        if (!any) syntax_error(pos, "sort name");
        expect_dot(pos);
    }

    void parse_subsorts(std::size_t& pos, MaudeModule& m) {
        Span stmt = toks_[pos].span;
        ++pos;
        std::vector<std::vector<std::string>> groups(1);
        while (at(pos) && !is_text(pos, ".")) {
            if (is_text(pos, "<")) {
                groups.emplace_back();
            } else if (toks_[pos].kind != TokenKind::Keyword) {
                groups.back().push_back(toks_[pos].text);
            } else {
                break;
            }
            ++pos;
        }
        bool ok = groups.size() >= 2;
        for (const auto& g : groups) ok = ok && !g.empty();
        if (!ok) {
            bag_.error("syntax-error", "subsort declaration needs sorts on both sides of '<'",
                       stmt);
        } else {
            for (std::size_t i = 0; i + 1 < groups.size(); ++i)
                for (const auto& sub : groups[i])
                    for (const auto& super : groups[i + 1]) m.subsorts.emplace_back(sub, super);
        }
        expect_dot(pos);
    }

    void parse_ops(std::size_t& pos, MaudeModule& m) {
        bool plural = toks_[pos].text == "ops";
        Span stmt = toks_[pos].span;
        ++pos;
        std::vector<std::pair<std::string, Span>> names;
        while (at(pos) && !is_text(pos, ":") && !is_text(pos, ".") &&
               toks_[pos].kind != TokenKind::Keyword) {
            names.emplace_back(toks_[pos].text, toks_[pos].span);
            ++pos;
        }
        if (names.empty() || (!plural && names.size() != 1)) {
            syntax_error(pos, plural ? "operator names" : "exactly one operator name");
            skip_statement(pos);
            return;
        }
        if (!is_text(pos, ":")) {
            syntax_error(pos, "':'");
            skip_statement(pos);
            return;
        }
        ++pos;
        std::vector<std::string> args;
        while (at(pos) && !is_text(pos, "->") && !is_text(pos, ".") &&
               toks_[pos].kind != TokenKind::Keyword) {
            args.push_back(toks_[pos].text);
            ++pos;
        }
        if (!is_text(pos, "->")) {
            syntax_error(pos, "'->'");
            skip_statement(pos);
            return;
        }
        ++pos;
        if (!at(pos) || is_text(pos, ".") || is_text(pos, "[")) {
            syntax_error(pos, "target sort");
            skip_statement(pos);
            return;
        }
        std::string target = toks_[pos++].text;

        OpDecl proto;
        proto.args = args;
        proto.target = target;
        proto.span = stmt;
        if (is_text(pos, "[")) parse_attrs(pos, proto);
        expect_dot(pos);

        for (const auto& [name, nspan] : names) {
            OpDecl op = proto;
            op.name = name;
            op.span = nspan;
            std::size_t slots = mixfix_arity(name);
            if (slots != 0 && slots != op.args.size()) {
                bag_.error("syntax-error",
                           "operator '" + name + "' has " + std::to_string(slots) +
                               " argument slots but " + std::to_string(op.args.size()) +
                               " argument sorts",
                           nspan);
                continue;
            }
            bool dup = false;
            for (const auto& other : m.ops)
                dup = dup || (other.name == op.name && other.args == op.args &&
                              other.target == op.target);
            if (dup) {
                bag_.error("duplicate-op", "duplicate declaration of '" + signature_string(op) + "'",
                           nspan);
                continue;
            }
            if (op.has_id) pending_ids_.push_back(static_cast<int>(m.ops.size()));
            m.ops.push_back(std::move(op));
        }
    }

    void parse_attrs(std::size_t& pos, OpDecl& op) {
        ++pos;   // '['
        while (at(pos) && !is_text(pos, "]")) {
            const Token& t = toks_[pos];
            if (t.text == "ctor") {
                op.ctor = true;
                ++pos;
            } else if (t.text == "assoc") {
                op.assoc = true;
                ++pos;
            } else if (t.text == "comm") {
                op.comm = true;
                ++pos;
            } else if (t.text == "id:" || (t.text == "id" && is_text(pos + 1, ":"))) {
                pos += (t.text == "id:") ? 1 : 2;
                op.has_id = true;
                int depth = 0;
                while (at(pos) && (depth > 0 || !is_text(pos, "]"))) {
                    if (is_text(pos, "(")) ++depth;
                    if (is_text(pos, ")")) --depth;
                    op.id_tokens.push_back(toks_[pos]);
                    ++pos;
                }
                if (op.id_tokens.empty())
                    bag_.error("syntax-error", "id: attribute needs an identity element", t.span);
            } else {
                bag_.error("unknown-attribute", "unknown operator attribute '" + t.text + "'",
                           t.span);
                ++pos;
            }
        }
        if (is_text(pos, "]"))
            ++pos;
        else
            syntax_error(pos, "']'");
    }

    void parse_vars(std::size_t& pos, MaudeModule& m) {
        ++pos;
        std::vector<std::pair<std::string, Span>> names;
        while (at(pos) && !is_text(pos, ":") && !is_text(pos, ".") &&
               toks_[pos].kind != TokenKind::Keyword) {
            names.emplace_back(toks_[pos].text, toks_[pos].span);
            ++pos;
        }
        if (!is_text(pos, ":") || names.empty()) {
            syntax_error(pos, "variable names and ':'");
            skip_statement(pos);
            return;
        }
        ++pos;
        if (!at(pos) || is_text(pos, ".")) {
            syntax_error(pos, "sort name");
            skip_statement(pos);
            return;
        }
        std::string sort = toks_[pos++].text;
        for (const auto& [name, nspan] : names) {
            if (m.var_sort(name))
                bag_.error("duplicate-var", "variable '" + name + "' is already declared", nspan);
            else
                m.vars.emplace_back(name, sort);
        }
        expect_dot(pos);
    }

    // Collects token positions of one statement body up to the closing '.',
    // splitting at top-level occurrences of the given separators.
    std::size_t statement_end(std::size_t pos) const {
        int depth = 0;
        while (pos < toks_.size()) {
            const std::string& t = toks_[pos].text;
            if (t == "(") ++depth;
            else if (t == ")") --depth;
            else if (t == "." && depth == 0) return pos;
            else if (toks_[pos].kind == TokenKind::Keyword && toks_[pos].text == "endfm" && depth == 0)
                return pos;
            ++pos;
        }
        return pos;
    }

    std::optional<std::size_t> find_top_level(std::size_t lo, std::size_t hi,
                                              const char* text, bool last = false) const {
        std::optional<std::size_t> found;
        int depth = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            const std::string& t = toks_[i].text;
            if (t == "(") ++depth;
            else if (t == ")") --depth;
            else if (depth == 0 && t == text) {
                found = i;
                if (!last) return found;
            }
        }
        return found;
    }

    std::vector<std::pair<std::size_t, std::size_t>> split_condition(std::size_t lo,
                                                                     std::size_t hi) {
        std::vector<std::pair<std::size_t, std::size_t>> frags;
        std::size_t start = lo;
        int depth = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            const std::string& t = toks_[i].text;
            if (t == "(") ++depth;
            else if (t == ")") --depth;
            else if (depth == 0 && t == "/\\") {
                frags.emplace_back(start, i);
                start = i + 1;
            }
        }
        frags.emplace_back(start, hi);
        return frags;
    }

    void parse_eq(std::size_t& pos) {
        bool conditional = toks_[pos].text == "ceq";
        Span stmt = toks_[pos].span;
        ++pos;
        std::size_t end = statement_end(pos);
        std::size_t body_end = end;
        PendingEq pe;
        pe.span = stmt;
        if (conditional) {
            auto if_pos = find_top_level(pos, end, "if");
            if (!if_pos) {
                bag_.error("syntax-error", "ceq needs an 'if' condition", stmt);
                pos = end + (end < toks_.size() && toks_[end].text == "." ? 1 : 0);
                return;
            }
            for (auto [a, b] : split_condition(*if_pos + 1, end)) pe.cond.push_back({a, b});
            body_end = *if_pos;
        }
        auto eq_pos = find_top_level(pos, body_end, "=");
        if (!eq_pos || *eq_pos == pos || *eq_pos + 1 == body_end) {
            bag_.error("syntax-error", "equation needs '=' with terms on both sides", stmt);
            pos = end + (end < toks_.size() && toks_[end].text == "." ? 1 : 0);
            return;
        }
        pe.lhs_lo = pos;
        pe.lhs_hi = *eq_pos;
        pe.rhs_lo = *eq_pos + 1;
        pe.rhs_hi = body_end;
        pending_eqs_.push_back(std::move(pe));
        pos = end;
        expect_dot(pos);
    }

    void parse_mb(std::size_t& pos) {
        bool conditional = toks_[pos].text == "cmb";
        Span stmt = toks_[pos].span;
        ++pos;
        std::size_t end = statement_end(pos);
        std::size_t body_end = end;
        PendingMb pm;
        pm.span = stmt;
        if (conditional) {
            auto if_pos = find_top_level(pos, end, "if");
            if (!if_pos) {
                bag_.error("syntax-error", "cmb needs an 'if' condition", stmt);
                pos = end + (end < toks_.size() && toks_[end].text == "." ? 1 : 0);
                return;
            }
            for (auto [a, b] : split_condition(*if_pos + 1, end)) pm.cond.push_back({a, b});
            body_end = *if_pos;
        }
        auto colon = find_top_level(pos, body_end, ":", /*last=*/true);
        if (!colon || *colon == pos || *colon + 2 != body_end) {
            bag_.error("syntax-error", "membership needs 'term : Sort'", stmt);
            pos = end + (end < toks_.size() && toks_[end].text == "." ? 1 : 0);
            return;
        }
        pm.subj_lo = pos;
        pm.subj_hi = *colon;
        pm.sort = toks_[*colon + 1].text;
        pending_mbs_.push_back(std::move(pm));
        pos = end;
        expect_dot(pos);
    }

    ConditionFragment resolve_fragment(MixfixParser& mp, const MaudeModule& m, const SortPoset& p,
                                       std::size_t lo, std::size_t hi, bool& ok) {
        ConditionFragment f;
        f.span = Span{toks_[lo].span.begin, toks_[hi - 1].span.end, toks_[lo].span.line,
                      toks_[lo].span.column};
        auto eq = find_top_level(lo, hi, "=");
        if (eq) {
            f.kind = ConditionFragment::Kind::Equality;
            f.lhs = mp.parse(lo, *eq);
            f.rhs = mp.parse(*eq + 1, hi);
            ok = f.lhs && f.rhs;
            if (ok && !p.same_component(f.lhs->sort, f.rhs->sort)) {
                bag_.error("condition-kind-mismatch",
                           "condition equality sides have unrelated sorts '" + f.lhs->sort +
                               "' and '" + f.rhs->sort + "'",
                           f.span);
                ok = false;
            }
            return f;
        }
        auto colon = find_top_level(lo, hi, ":", /*last=*/true);
        if (colon && *colon + 2 == hi && *colon > lo) {
            f.kind = ConditionFragment::Kind::SortTest;
            f.lhs = mp.parse(lo, *colon);
            f.sort = toks_[hi - 1].text;
            ok = static_cast<bool>(f.lhs);
            if (ok && !m.has_sort(f.sort)) {
                bag_.error("undeclared-sort", "sort test uses undeclared sort '" + f.sort + "'",
                           f.span);
                ok = false;
            }
            if (ok && !p.same_component(f.lhs->sort, f.sort)) {
                bag_.error("condition-kind-mismatch",
                           "sort test subject sort '" + f.lhs->sort + "' is unrelated to '" +
                               f.sort + "'",
                           f.span);
                ok = false;
            }
            return f;
        }
        bag_.error("syntax-error", "malformed condition fragment (expected 't = u' or 't : S')",
                   f.span);
        ok = false;
        return f;
    }

    void resolve_terms(MaudeModule& m) {
        // Sort existence checks for declarations.
        for (const auto& op : m.ops) {
            for (const auto& a : op.args)
                if (!m.has_sort(a))
                    bag_.error("undeclared-sort",
                               "operator '" + op.name + "' uses undeclared sort '" + a + "'",
                               op.span);
            if (!m.has_sort(op.target))
                bag_.error("undeclared-sort",
                           "operator '" + op.name + "' uses undeclared sort '" + op.target + "'",
                           op.span);
        }
        for (const auto& [name, sort] : m.vars)
            if (!m.has_sort(sort))
                bag_.error("undeclared-sort",
                           "variable '" + name + "' uses undeclared sort '" + sort + "'");
        if (bag_.has_errors()) return;

        SortPoset p = build_poset(m, bag_);
        if (bag_.has_errors()) return;
        MixfixParser mp(toks_, m, p, bag_);

        // Structural-attribute validation needs the poset.
        for (const auto& op : m.ops) {
            if ((op.assoc || op.comm || op.has_id) &&
                (op.args.size() != 2 || !p.same_component(op.args[0], op.args[1]) ||
                 !p.same_component(op.args[0], op.target))) {
                bag_.error("invalid-attribute",
                           "assoc/comm/id require a binary operator whose argument and target "
                           "sorts share a component: " +
                               signature_string(op),
                           op.span);
            }
        }

        for (int op_index : pending_ids_) {
            OpDecl& op = m.ops[op_index];
            if (op.id_tokens.empty()) continue;
            // The id element's tokens were copied out; reparse them in place.
            id_scratch_ = op.id_tokens;
            MixfixParser idp(id_scratch_, m, p, bag_);
            op.id_term = idp.parse(0, id_scratch_.size());
            if (op.id_term) {
                least_sort(op.id_term, m, p, bag_);
                if (!op.id_term->sort.empty() && !op.args.empty() &&
                    !p.less_eq(op.id_term->sort, op.args[0]))
                    bag_.error("invalid-attribute",
                               "identity element of '" + op.name + "' has sort '" +
                                   op.id_term->sort + "', not below '" + op.args[0] + "'",
                               op.span);
            }
        }

        for (const auto& pe : pending_eqs_) {
            EquationDecl e;
            e.span = pe.span;
            e.lhs = mp.parse(pe.lhs_lo, pe.lhs_hi);
            e.rhs = mp.parse(pe.rhs_lo, pe.rhs_hi);
            if (!e.lhs || !e.rhs) continue;
            std::string ls = least_sort(e.lhs, m, p, bag_);
            std::string rs = least_sort(e.rhs, m, p, bag_);
            if (ls.empty() || rs.empty()) continue;
            if (!p.same_component(ls, rs)) {
                bag_.error("equation-kind-mismatch",
                           "equation sides have unrelated sorts '" + ls + "' and '" + rs + "'",
                           pe.span);
                continue;
            }
            bool ok = true;
            for (auto [a, b] : pe.cond) {
                ConditionFragment f = resolve_fragment(mp, m, p, a, b, ok);
                if (!ok) break;
                if (f.lhs) least_sort(f.lhs, m, p, bag_);
                if (f.rhs) least_sort(f.rhs, m, p, bag_);
                e.condition.push_back(std::move(f));
            }
            if (ok) m.equations.push_back(std::move(e));
        }

        for (const auto& pm : pending_mbs_) {
            MembershipDecl mb;
            mb.span = pm.span;
            mb.sort = pm.sort;
            mb.subject = mp.parse(pm.subj_lo, pm.subj_hi);
            if (!mb.subject) continue;
            if (!m.has_sort(mb.sort)) {
                bag_.error("undeclared-sort",
                           "membership uses undeclared sort '" + mb.sort + "'", pm.span);
                continue;
            }
            std::string ss = least_sort(mb.subject, m, p, bag_);
            if (ss.empty()) continue;
            if (!p.same_component(ss, mb.sort)) {
                bag_.error("membership-kind-mismatch",
                           "membership subject sort '" + ss + "' is unrelated to '" + mb.sort +
                               "'",
                           pm.span);
                continue;
            }
            bool ok = true;
            for (auto [a, b] : pm.cond) {
                ConditionFragment f = resolve_fragment(mp, m, p, a, b, ok);
                if (!ok) break;
                if (f.lhs) least_sort(f.lhs, m, p, bag_);
                if (f.rhs) least_sort(f.rhs, m, p, bag_);
                mb.condition.push_back(std::move(f));
            }
            if (ok) m.memberships.push_back(std::move(mb));
        }
    }

    std::vector<Token> id_scratch_;
};

// Convenience wrappers matching the operation-level API.

inline std::vector<MaudeModule> parse_modules(const std::vector<Token>& toks, DiagnosticBag& bag,
                                              bool builtins = true) {
    ModuleParser p(toks, bag, builtins);
    return p.parse_file();
}

inline std::vector<MaudeModule> parse_source(const std::string& source, DiagnosticBag& bag,
                                             bool builtins = true) {
    std::vector<Token> toks = tokenize(source, bag);
    if (bag.has_errors()) return {};
    return parse_modules(toks, bag, builtins);
}

// Parses a standalone token range as a term of a finished module, consuming
// the whole range.
inline TermPtr parse_term(const std::vector<Token>& toks, const MaudeModule& m,
                          DiagnosticBag& bag) {
    SortPoset p = build_poset(m, bag);
    if (bag.has_errors()) return nullptr;
    MixfixParser mp(toks, m, p, bag);
    TermPtr t = mp.parse(0, toks.size());
    if (t) least_sort(t, m, p, bag);
    return t;
}

inline TermPtr parse_term_string(const std::string& src, const MaudeModule& m,
                                 DiagnosticBag& bag) {
    std::vector<Token> toks = tokenize(src, bag);
    if (bag.has_errors()) return nullptr;
    return parse_term(toks, m, bag);
}

} // namespace m2a
