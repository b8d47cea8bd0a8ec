#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "m2a/ast.hpp"

namespace m2a {

// Many-sorted target theory produced by the translator and consumed by the
// emitter and the equational oracle.  Target terms reuse the Term node: every
// node carries its exact (many-sorted) sort, and applications carry the index
// of their symbol in TranslatedTheory::symbols as decl_index.

enum class SymbolRole {
    Function,    // user operator class representative (or imported stub)
    Constructor, // class representative flagged as a constructor
    Cast,        // injection between two sorts of one connected component
    Predicate,   // membership test targeting Boolean
};

struct TargetSymbol {
    std::string name;
    std::vector<std::string> args;
    std::string target;
    SymbolRole role = SymbolRole::Function;
    int source_decl = -1;   // representative OpDecl index, -1 for generated symbols
    bool in_datatype = false; // declared by a datatype line instead of `declare`
};

struct DatatypeCtor {
    std::string name;
    std::vector<std::string> args;
};

struct DatatypeDecl {
    std::string sort;
    std::vector<DatatypeCtor> ctors;
};

struct DomainsDecl {
    std::vector<std::string> sorts; // declaration order, synthesized sort last
};

struct DefineLine {
    std::vector<std::string> names;
    std::vector<std::string> sorts; // parallel to names
};

// One conjunct of an assertion guard.
struct TargetCondition {
    bool is_membership = false;
    TermPtr lhs;       // equality: left side; membership: subject
    TermPtr rhs;       // equality only
    std::string sort;  // membership only: tested sort
};

struct TargetAssertion {
    std::string name;
    bool starred = true;               // assert* vs assert
    std::vector<std::pair<std::string, std::string>> binders; // explicit (forall ?v:S ...) wrappers
    std::vector<TargetCondition> conditions;
    bool is_membership_fact = false;   // body is (is_S subject) instead of an equality
    TermPtr lhs;                       // equality left / membership subject
    TermPtr rhs;                       // equality right
    std::string sort;                  // membership fact: asserted sort
};

struct Obligation {
    std::string name;
    bool inductive = false;                                  // has at least one hypothesis
    std::vector<std::pair<std::string, std::string>> vars;   // forall binding order
    std::vector<TermPtr> hyps;  // arguments of (property _) hypotheses
    TermPtr concl;              // argument of the concluding (property _)
};

struct InductionScheme {
    std::string method_name;
    std::string kind_sort;
    std::string conclusion_var;
    std::vector<Obligation> obligations; // bases first, then inductive steps
};

struct TranslatedTheory {
    std::string module_name;
    std::vector<DatatypeDecl> datatypes;
    std::vector<DomainsDecl> domains;
    std::vector<TargetSymbol> symbols;  // declaration order for emission
    std::vector<DefineLine> defines;
    std::vector<TargetAssertion> assertions;
    std::vector<InductionScheme> methods;

    const TargetSymbol* find_symbol(const std::string& name) const {
        for (const auto& s : symbols)
            if (s.name == name) return &s;
        return nullptr;
    }
};

} // namespace m2a
