#include <algorithm>

#include "catch2/catch_amalgamated.hpp"

#include "helpers.hpp"

using namespace m2a;
using testutil::app;
using testutil::ground;
using testutil::parse_fixture;
using testutil::parse_one;

TEST_CASE("subsort closure is reflexive and transitive") {
    MaudeModule m = parse_fixture("chain.maude");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);
    REQUIRE_FALSE(bag.has_errors());
    CHECK(p.less_eq("A", "A"));
    CHECK(p.less_eq("A", "B"));
    CHECK(p.less_eq("B", "C"));
    CHECK(p.less_eq("A", "C")); // composed
    CHECK_FALSE(p.less_eq("C", "A"));
    CHECK(p.strictly_less("A", "C"));
    REQUIRE(p.components.size() == 1);
    REQUIRE(p.maximal[0].size() == 1);
    CHECK(p.sorts[p.maximal[0][0]] == "C");
    CHECK(p.kind_name(0) == "C");
}

TEST_CASE("peano has one component with Nat on top") {
    MaudeModule m = parse_fixture("peano.maude");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);
    REQUIRE(p.components.size() == 1);
    CHECK(p.kind_of_sort("Even") == "Nat");
    CHECK(p.same_component("Even", "NzNat"));
    CHECK_FALSE(p.has_synthesized_kind(0));
}

TEST_CASE("subsort cycles are rejected") {
    DiagnosticBag bag;
    parse_source("fmod M is\n"
                 "  sorts A B .\n"
                 "  subsort A < B .\n"
                 "  subsort B < A .\n"
                 "endfm\n",
                 bag);
    REQUIRE(bag.has_errors());
    CHECK(bag.all()[0].rule == "subsort-cycle");
}

TEST_CASE("strict cast pairs list declared pairs before composites") {
    MaudeModule m = parse_fixture("chain.maude");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);
    auto pairs = strict_cast_pairs(m, p);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == std::pair<std::string, std::string>("A", "B"));
    CHECK(pairs[1] == std::pair<std::string, std::string>("B", "C"));
    CHECK(pairs[2] == std::pair<std::string, std::string>("A", "C"));
}

TEST_CASE("least sorts follow the most specific applicable declaration") {
    MaudeModule m = parse_fixture("peano.maude");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);

    auto zero = ground(app("zero"), m, p);
    CHECK(zero->sort == "Even");
    auto one = ground(app("s_", {app("zero")}), m, p);
    CHECK(one->sort == "NzNat");
    auto sum = ground(app("_plus_", {app("zero"), app("zero")}), m, p);
    CHECK(sum->sort == "Nat");
}

TEST_CASE("unknown identifiers and inapplicable declarations are errors") {
    MaudeModule m = parse_fixture("peano.maude");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);

    DiagnosticBag b1;
    CHECK(least_sort(make_var("Ghost", ""), m, p, b1).empty());
    REQUIRE(b1.has_errors());
    CHECK(b1.all()[0].rule == "unknown-identifier");

    DiagnosticBag b2;
    CHECK(least_sort(app("s_", {app("zero"), app("zero")}), m, p, b2).empty());
    REQUIRE(b2.has_errors());
    CHECK(b2.all()[0].rule == "no-applicable-declaration");

    DiagnosticBag b3;
    CHECK(least_sort(app("ghost"), m, p, b3).empty());
    REQUIRE(b3.has_errors());
    CHECK(b3.all()[0].rule == "no-applicable-declaration");
}

TEST_CASE("two incomparable least targets violate preregularity") {
    // f is declared at A and at B, which only share the lower bound C; f(c)
    // then has the applicable targets {A, B} with no least element.
    MaudeModule m = parse_one("fmod M is\n"
                              "  sorts A B C .\n"
                              "  subsort C < A .\n"
                              "  subsort C < B .\n"
                              "  op c : -> C [ctor] .\n"
                              "  op f : A -> A .\n"
                              "  op f : B -> B .\n"
                              "endfm\n");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);
    DiagnosticBag b;
    CHECK(least_sort(app("f", {app("c")}), m, p, b).empty());
    REQUIRE(b.has_errors());
    CHECK(b.all()[0].rule == "non-preregular");
}

TEST_CASE("overload classes group argument-compatible declarations only") {
    MaudeModule m = parse_fixture("toy_compiler.maude");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);
    auto classes = ac_classes(m, p);

    // mult : Exp Exp -> Exp and mult : -> Instr have different arities and
    // must stay apart.
    std::vector<int> mult_classes;
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (int i : classes[c].members)
            if (m.ops[i].name == "_mult_" || m.ops[i].name == "mult")
                mult_classes.push_back(static_cast<int>(c));
    REQUIRE(mult_classes.size() == 2);
    CHECK(mult_classes[0] != mult_classes[1]);

    // Every class representative is a member.
    for (const auto& c : classes) {
        REQUIRE_FALSE(c.members.empty());
        CHECK(std::find(c.members.begin(), c.members.end(), c.representative) != c.members.end());
    }
}

TEST_CASE("sensibility verdicts for the rejection fixtures") {
    SECTION("targets disagree") {
        MaudeModule m = parse_fixture("bad_strong.maude");
        DiagnosticBag bag;
        SortPoset p = build_poset(m, bag);
        auto rep = check_strict_sensibility(ac_classes(m, p), m);
        CHECK_FALSE(rep.strongly_sensible);
        CHECK_FALSE(rep.strictly_sensible());
        REQUIRE_FALSE(rep.violations.empty());
        CHECK(rep.violations[0].rule == "strong-sensibility");
    }
    SECTION("no pointwise-greatest member") {
        MaudeModule m = parse_fixture("bad_max.maude");
        DiagnosticBag bag;
        SortPoset p = build_poset(m, bag);
        auto rep = check_strict_sensibility(ac_classes(m, p), m);
        CHECK(rep.strongly_sensible);
        CHECK_FALSE(rep.maximal_bounding);
        REQUIRE_FALSE(rep.violations.empty());
        CHECK(rep.violations[0].rule == "maximal-bounding");
    }
    SECTION("the translating fixtures are strictly sensible") {
        for (const char* name : {"peano.maude", "peano_simple.maude", "toy_compiler.maude",
                                 "chain.maude"}) {
            MaudeModule m = parse_fixture(name);
            DiagnosticBag bag;
            SortPoset p = build_poset(m, bag);
            INFO(name);
            CHECK(check_strict_sensibility(ac_classes(m, p), m).strictly_sensible());
        }
    }
}

TEST_CASE("constructor subsignature of the compiler module") {
    MaudeModule m = parse_fixture("toy_compiler.maude");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);
    auto ctors = constructor_subsignature(m, p, bag);

    std::vector<std::string> names;
    for (int d : ctors.decls) names.push_back(m.ops[d].name);
    std::sort(names.begin(), names.end());
    std::vector<std::string> expected = {"_++_", "_::_",  "_minus_", "_mult_", "_plus_", "add",
                                         "empty", "mult", "nil",     "push",   "sub"};
    std::sort(expected.begin(), expected.end());
    CHECK(names == expected);

    // Int's component has no constructors (builtin stubs are not ctors).
    int int_comp = p.component_of[p.sort_index("Int")];
    int stack_comp = p.component_of[p.sort_index("Stack")];
    CHECK(p.component_of[p.sort_index("Exp")] == int_comp);
    CHECK(ctors.component_has_ctor[int_comp]); // Exp constructors live there
    CHECK(ctors.component_has_ctor[stack_comp]);
}

TEST_CASE("modules without constructors warn") {
    MaudeModule m = parse_one("fmod M is\n"
                              "  sort A .\n"
                              "  op f : A -> A .\n"
                              "endfm\n");
    DiagnosticBag bag;
    SortPoset p = build_poset(m, bag);
    constructor_subsignature(m, p, bag);
    CHECK_FALSE(bag.has_errors());
    REQUIRE(bag.has_warnings());
    bool saw = false;
    for (const auto& d : bag.all()) saw = saw || d.rule == "no-constructors";
    CHECK(saw);
}
