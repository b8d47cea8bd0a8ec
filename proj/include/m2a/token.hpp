#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "m2a/diagnostics.hpp"

namespace m2a {

enum class TokenKind { Keyword, Identifier, Punctuation, Special };

struct Token {
    TokenKind kind = TokenKind::Identifier;
    std::string text;
    Span span;
};

namespace detail {

inline bool is_keyword(std::string_view s) {
    static constexpr std::array<std::string_view, 17> kws = {
        "fmod", "endfm", "is",   "sort", "sorts", "subsort", "subsorts", "op", "ops",
        "var",  "vars",  "eq",   "ceq",  "mb",    "cmb",     "protecting", "if"};
    for (auto k : kws)
        if (k == s) return true;
    return false;
}

// Characters that always form their own single-character token.
inline bool is_self_delimiting(char c) {
    return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',';
}

inline bool is_all_alnum(std::string_view s) {
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) return false;
    return !s.empty();
}

inline bool is_punct_chunk(std::string_view s) {
    return s == "." || s == ":" || s == "<" || s == "->" || s == "=" || s == "/\\";
}

} // namespace detail

inline TokenKind classify_token(std::string_view text) {
    if (detail::is_keyword(text)) return TokenKind::Keyword;
    if (text.size() == 1 && detail::is_self_delimiting(text[0])) return TokenKind::Punctuation;
    if (detail::is_punct_chunk(text)) return TokenKind::Punctuation;
    if (detail::is_all_alnum(text)) return TokenKind::Identifier;
    return TokenKind::Special;
}

// Splits Maude source into tokens. Chunks are whitespace-separated; the
// bracketing characters ()[]{} and commas self-delimit inside a chunk.
// `---` starts a comment running to end of line.
inline std::vector<Token> tokenize(std::string_view source, DiagnosticBag& bag) {
    std::vector<Token> out;
    const uint32_t n = static_cast<uint32_t>(source.size());
    uint32_t line = 1, col = 1;

    auto advance = [&](uint32_t& i) {
        if (source[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };

    auto push = [&](uint32_t begin, uint32_t end, uint32_t tline, uint32_t tcol) {
        Token t;
        t.text = std::string(source.substr(begin, end - begin));
        t.span = Span{begin, end, tline, tcol};
        t.kind = classify_token(t.text);
        out.push_back(std::move(t));
    };

    uint32_t i = 0;
    while (i < n) {
        char c = source[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(i);
            continue;
        }
        if (c == '-' && i + 2 < n && source[i + 1] == '-' && source[i + 2] == '-') {
            while (i < n && source[i] != '\n') advance(i);
            continue;
        }
        if (std::iscntrl(static_cast<unsigned char>(c))) {
            bag.error("unterminated-token",
                      "stray control character (0x" + [](unsigned v) {
                          const char* hex = "0123456789abcdef";
                          return std::string{hex[(v >> 4) & 0xf], hex[v & 0xf]};
                      }(static_cast<unsigned char>(c)) + ") in source",
                      Span{i, i + 1, line, col});
            advance(i);
            continue;
        }
        if (detail::is_self_delimiting(c)) {
            push(i, i + 1, line, col);
            advance(i);
            continue;
        }
        uint32_t begin = i, bline = line, bcol = col;
        while (i < n && !std::isspace(static_cast<unsigned char>(source[i])) &&
               !detail::is_self_delimiting(source[i]) &&
               !std::iscntrl(static_cast<unsigned char>(source[i]))) {
            if (source[i] == '-' && i + 2 < n && source[i + 1] == '-' && source[i + 2] == '-')
                break;
            advance(i);
        }
        if (i > begin) push(begin, i, bline, bcol);
    }
    return out;
}

} // namespace m2a
