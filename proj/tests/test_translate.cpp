#include <string>
#include <vector>

#include "catch2/catch_amalgamated.hpp"

#include "helpers.hpp"

using namespace m2a;
using testutil::app;
using testutil::parse_one;
using testutil::translate_fixture;

namespace {

std::optional<Translation> translate_text(const std::string& text, DiagnosticBag& bag,
                                          TranslateOptions opts = {}) {
    return translate(parse_one(text), bag, opts);
}

std::vector<std::string> obligation_names(const InductionScheme& s) {
    std::vector<std::string> out;
    for (const auto& o : s.obligations) out.push_back(o.name);
    return out;
}

const TargetAssertion* find_assertion(const TranslatedTheory& th, const std::string& name) {
    for (const auto& a : th.assertions)
        if (a.name == name) return &a;
    return nullptr;
}

} // namespace

TEST_CASE("subsorted component becomes domains plus casts") {
    Translation tr = translate_fixture("peano.maude");
    const TranslatedTheory& th = tr.theory;

    CHECK(th.datatypes.empty());
    REQUIRE(th.domains.size() == 1);
    CHECK(th.domains[0].sorts == std::vector<std::string>{"Nat", "Even", "NzNat"});

    REQUIRE(tr.casts.size() == 2);
    CHECK(tr.casts[0] == std::pair<std::string, std::string>("Even", "Nat"));
    CHECK(tr.casts[1] == std::pair<std::string, std::string>("NzNat", "Nat"));

    const TargetSymbol* c1 = th.find_symbol("Cast_Even_to_Nat");
    REQUIRE(c1);
    CHECK(c1->role == SymbolRole::Cast);
    CHECK(c1->args == std::vector<std::string>{"Even"});
    CHECK(c1->target == "Nat");

    // Two incomparable subsorts compose no cast pair: no core equalities.
    for (const auto& a : th.assertions) CHECK(a.name.rfind("core_eq_", 0) != 0);

    const TargetSymbol* pred = th.find_symbol("is_Even");
    REQUIRE(pred);
    CHECK(pred->role == SymbolRole::Predicate);
    CHECK(pred->args == std::vector<std::string>{"Nat"});
    CHECK(pred->target == "Boolean");
    CHECK_FALSE(th.find_symbol("is_NzNat")); // no membership mentions NzNat
}

TEST_CASE("membership axioms become guarded predicate facts") {
    Translation tr = translate_fixture("peano.maude");
    const TargetAssertion* mb = find_assertion(tr.theory, "mb_1");
    REQUIRE(mb);
    CHECK(mb->is_membership_fact);
    CHECK(mb->sort == "Even");
    REQUIRE(mb->conditions.size() == 1);
    CHECK(mb->conditions[0].is_membership);
    CHECK(mb->conditions[0].sort == "Even");
    // Subject translated at the kind: s S N sits under two injections.
    REQUIRE(mb->lhs);
    CHECK(mb->lhs->name == "Cast_NzNat_to_Nat");
}

TEST_CASE("single-component constructor modules become datatypes") {
    Translation tr = translate_fixture("peano_simple.maude");
    const TranslatedTheory& th = tr.theory;

    REQUIRE(th.datatypes.size() == 1);
    CHECK(th.domains.empty());
    CHECK(tr.casts.empty());
    const DatatypeDecl& dt = th.datatypes[0];
    CHECK(dt.sort == "Nat");
    REQUIRE(dt.ctors.size() == 2);
    CHECK(dt.ctors[0].name == "zero");
    CHECK(dt.ctors[0].args.empty());
    CHECK(dt.ctors[1].name == "s");
    CHECK(dt.ctors[1].args == std::vector<std::string>{"Nat"});

    // Datatypes carry their own structural induction; no method is generated.
    CHECK(th.methods.empty());

    const TargetSymbol* plus = th.find_symbol("plus");
    REQUIRE(plus);
    CHECK(plus->role == SymbolRole::Function);
    CHECK(plus->args == std::vector<std::string>{"Nat", "Nat"});
}

TEST_CASE("composable cast triples produce unstarred core equalities") {
    Translation tr = translate_fixture("chain.maude");
    const TranslatedTheory& th = tr.theory;

    REQUIRE(tr.casts.size() == 3);
    CHECK(tr.casts[2] == std::pair<std::string, std::string>("A", "C")); // composite last

    const TargetAssertion* core = find_assertion(th, "core_eq_A_B_C");
    REQUIRE(core);
    CHECK_FALSE(core->starred);
    REQUIRE(core->binders.size() == 1);
    CHECK(core->binders[0] == std::pair<std::string, std::string>("x", "A"));
    CHECK(core->lhs->name == "Cast_B_to_C");
    CHECK(core->lhs->args[0]->name == "Cast_A_to_B");
    CHECK(core->rhs->name == "Cast_A_to_C");
}

TEST_CASE("equation sides meet at the least upper bound of their sorts") {
    SECTION("comparable sides cast upward only as needed") {
        Translation tr = translate_fixture("chain.maude");
        const TargetAssertion* eq = find_assertion(tr.theory, "eq_1");
        REQUIRE(eq);
        CHECK(eq->lhs->name == "b"); // already at B
        CHECK(eq->rhs->name == "Cast_A_to_B");
        CHECK(eq->rhs->args[0]->name == "a");
    }
    SECTION("incomparable sides both cast to the common upper bound") {
        DiagnosticBag bag;
        auto tr = translate_text("fmod M is\n"
                                 "  sorts A B T .\n"
                                 "  subsorts A B < T .\n"
                                 "  op a : -> A [ctor] .\n"
                                 "  op b : -> B [ctor] .\n"
                                 "  eq a = b .\n"
                                 "endfm\n",
                                 bag);
        REQUIRE(tr);
        const TargetAssertion* eq = find_assertion(tr->theory, "eq_1");
        REQUIRE(eq);
        CHECK(eq->lhs->name == "Cast_A_to_T");
        CHECK(eq->rhs->name == "Cast_B_to_T");
    }
}

TEST_CASE("components with several maximal sorts synthesize a kind sort") {
    DiagnosticBag bag;
    TranslateOptions opts;
    opts.induction = false;
    auto tr = translate_text("fmod M is\n"
                             "  sorts A B C .\n"
                             "  subsort C < A .\n"
                             "  subsort C < B .\n"
                             "  op c : -> C [ctor] .\n"
                             "endfm\n",
                             bag, opts);
    REQUIRE(tr);
    bool warned = false;
    for (const auto& d : bag.all()) warned = warned || d.rule == "multiple-maximal";
    CHECK(warned);
    CHECK(tr->kind_of("A") == "K_A_B_C");
    REQUIRE(tr->theory.domains.size() == 1);
    CHECK(tr->theory.domains[0].sorts.back() == "K_A_B_C"); // synthesized sort last
}

TEST_CASE("structural axioms demand a uniform binary signature") {
    DiagnosticBag bag;
    parse_source("fmod M is\n"
                 "  sorts A B .\n"
                 "  op g : A B -> A [assoc] .\n"
                 "endfm\n",
                 bag);
    REQUIRE(bag.has_errors());
    bool saw = false;
    for (const auto& d : bag.all()) saw = saw || d.rule == "invalid-attribute";
    CHECK(saw);
}

TEST_CASE("operators over undeclared sorts are rejected") {
    DiagnosticBag bag;
    parse_source("fmod M is\n"
                 "  sort A .\n"
                 "  op f : A -> Ghost .\n"
                 "endfm\n",
                 bag);
    REQUIRE(bag.has_errors());
    CHECK(bag.all()[0].rule == "undeclared-sort");
}

TEST_CASE("sensibility violations block translation") {
    for (const char* name : {"bad_strong.maude", "bad_max.maude"}) {
        DiagnosticBag bag;
        auto tr = translate(testutil::parse_fixture(name), bag);
        INFO(name);
        CHECK_FALSE(tr.has_value());
        CHECK(bag.has_errors());
    }
}

TEST_CASE("induction scheme shapes") {
    SECTION("one basis and one step collapse to bare names") {
        Translation tr = translate_fixture("peano.maude");
        REQUIRE(tr.theory.methods.size() == 1);
        const InductionScheme& s = tr.theory.methods[0];
        CHECK(s.method_name == "nat-induction");
        CHECK(s.kind_sort == "Nat");
        CHECK(s.conclusion_var == "x");
        CHECK(obligation_names(s) == std::vector<std::string>{"basis", "ic"});
        CHECK_FALSE(s.obligations[0].inductive);
        CHECK(s.obligations[0].vars.empty());
        CHECK(s.obligations[0].concl->name == "Cast_Even_to_Nat");
        CHECK(s.obligations[1].inductive);
        REQUIRE(s.obligations[1].hyps.size() == 1);
        CHECK(s.obligations[1].hyps[0]->name == "x");
        CHECK(s.obligations[1].concl->name == "Cast_NzNat_to_Nat");
    }
    SECTION("several obligations are named after their constructors") {
        Translation tr = translate_fixture("toy_compiler.maude");
        REQUIRE(tr.theory.methods.size() == 2);
        const InductionScheme& exp = tr.theory.methods[0];
        CHECK(exp.method_name == "exp-induction");
        CHECK(obligation_names(exp) ==
              std::vector<std::string>{"basis_n", "ic_plus", "ic_minus", "ic_mult"});
        const InductionScheme& prog = tr.theory.methods[1];
        CHECK(prog.method_name == "program-induction");
        CHECK(obligation_names(prog) ==
              std::vector<std::string>{"basis_push", "basis_add", "basis_sub", "basis_mult",
                                       "basis_nil", "ic_++"});
        CHECK(prog.conclusion_var == "x3");
    }
    SECTION("induction can be disabled") {
        TranslateOptions opts;
        opts.induction = false;
        Translation tr = translate_fixture("peano.maude", opts);
        CHECK(tr.theory.methods.empty());
    }
    SECTION("constructorless components draw a warning only when inducting") {
        const std::string text = "fmod M is\n"
                                 "  sort A .\n"
                                 "  op f : A -> A .\n"
                                 "endfm\n";
        DiagnosticBag with;
        REQUIRE(translate_text(text, with).has_value());
        bool warned = false;
        for (const auto& d : with.all()) warned = warned || d.rule == "no-constructors";
        CHECK(warned);

        DiagnosticBag without;
        TranslateOptions opts;
        opts.induction = false;
        REQUIRE(translate_text(text, without, opts).has_value());
        CHECK(without.all().empty());
    }
}

TEST_CASE("core equalities make cast paths provably equal") {
    Translation tr = translate_fixture("chain.maude");
    FlatTheory target = flatten_target(tr.theory);

    auto direct = app("Cast_A_to_C", {app("a")});
    direct->args[0]->sort = "A";
    direct->sort = "C";
    auto composed = app("Cast_B_to_C", {app("Cast_A_to_B", {app("a")})});
    composed->args[0]->args[0]->sort = "A";
    composed->args[0]->sort = "B";
    composed->sort = "C";

    OracleBudget budget;
    CHECK(decide_equal(direct, composed, target, budget).verdict == Verdict::Equal);
}

TEST_CASE("term translation rejects sorts outside the expected cone") {
    Translation tr = translate_fixture("peano.maude");
    MaudeModule& m = tr.module;
    DiagnosticBag sorting;
    auto zero = app("zero");
    REQUIRE(least_sort(zero, m, tr.poset, sorting) == "Even");

    DiagnosticBag bag;
    auto out = tr.tr_term(zero, "NzNat", bag);
    CHECK(bag.has_errors());
    CHECK(bag.all()[0].rule == "incomparable-sorts");
}

TEST_CASE("translation output is deterministic") {
    std::string first = emit_theory(translate_fixture("toy_compiler.maude").theory);
    std::string second = emit_theory(translate_fixture("toy_compiler.maude").theory);
    CHECK(first == second);
}
