#include "catch2/catch_amalgamated.hpp"

#include "helpers.hpp"

using namespace m2a;
using testutil::slurp;

namespace {

std::vector<std::string> texts(const std::vector<Token>& toks) {
    std::vector<std::string> out;
    for (const auto& t : toks) out.push_back(t.text);
    return out;
}

} // namespace

TEST_CASE("keywords are classified as keyword tokens") {
    DiagnosticBag bag;
    auto toks = tokenize("fmod PEANO is", bag);
    REQUIRE(toks.size() == 3);
    CHECK(toks[0].kind == TokenKind::Keyword);
    CHECK(toks[0].text == "fmod");
    CHECK(toks[1].kind == TokenKind::Identifier);
    CHECK(toks[1].text == "PEANO");
    CHECK(toks[2].kind == TokenKind::Keyword);
    CHECK(bag.empty());
}

TEST_CASE("operator declarations split off brackets and dots") {
    DiagnosticBag bag;
    auto toks = tokenize("op _+_ : Nat Nat -> Nat [assoc] .", bag);
    auto t = texts(toks);
    REQUIRE(t == std::vector<std::string>{"op", "_+_", ":", "Nat", "Nat", "->", "Nat", "[",
                                          "assoc", "]", "."});
    CHECK(toks[1].kind == TokenKind::Special);
    CHECK(toks[7].kind == TokenKind::Punctuation); // "["
    CHECK(toks[10].kind == TokenKind::Punctuation); // "."
}

TEST_CASE("comments vanish entirely") {
    DiagnosticBag bag;
    CHECK(tokenize("--- I equations for minus", bag).empty());
    auto toks = tokenize("sort A . --- trailing note\nsort B .", bag);
    auto t = texts(toks);
    CHECK(t == std::vector<std::string>{"sort", "A", ".", "sort", "B", "."});
}

TEST_CASE("spans carry 1-based line and column") {
    DiagnosticBag bag;
    auto toks = tokenize("fmod M is\n  sort A .\nendfm", bag);
    REQUIRE(toks.size() >= 5);
    CHECK(toks[0].span.line == 1);
    CHECK(toks[0].span.column == 1);
    CHECK(toks[3].text == "sort");
    CHECK(toks[3].span.line == 2);
    CHECK(toks[3].span.column == 3);
}

TEST_CASE("stray control characters are reported with a span") {
    DiagnosticBag bag;
    auto toks = tokenize(std::string("sort A \x01 .", 10), bag);
    REQUIRE(bag.has_errors());
    CHECK(bag.all()[0].rule == "unterminated-token");
    REQUIRE(bag.all()[0].span.has_value());
    CHECK(bag.all()[0].span->column == 8);
    // The surrounding tokens still come through.
    CHECK(texts(toks) == std::vector<std::string>{"sort", "A", "."});
}

TEST_CASE("token texts joined by spaces retokenize identically") {
    // Whitespace and comments are the only information the lexer discards.
    for (const char* name : {"peano.maude", "peano_simple.maude", "toy_compiler.maude",
                             "chain.maude", "bad_strong.maude", "bad_max.maude"}) {
        DiagnosticBag bag;
        auto original = tokenize(slurp(testutil::fixture_path(name)), bag);
        REQUIRE(bag.empty());
        std::string joined;
        for (const auto& t : original) joined += t.text + " ";
        DiagnosticBag bag2;
        auto again = tokenize(joined, bag2);
        REQUIRE(bag2.empty());
        REQUIRE(again.size() == original.size());
        for (std::size_t i = 0; i < original.size(); ++i) {
            CHECK(again[i].text == original[i].text);
            CHECK(again[i].kind == original[i].kind);
        }
    }
}

TEST_CASE("self-delimiting characters split inside chunks") {
    DiagnosticBag bag;
    auto t = texts(tokenize("exec(nil, S)", bag));
    CHECK(t == std::vector<std::string>{"exec", "(", "nil", ",", "S", ")"});
}
