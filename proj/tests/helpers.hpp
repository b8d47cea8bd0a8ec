#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "m2a/m2a.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(M2A_FIXTURE_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(M2A_GOLDEN_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Parses source text expected to hold exactly one well-formed module.
inline m2a::MaudeModule parse_one(const std::string& text, bool builtins = true) {
    m2a::DiagnosticBag bag;
    auto mods = m2a::parse_source(text, bag, builtins);
    if (bag.has_errors() || mods.size() != 1) {
        std::string what = "parse_one failed:";
        for (const auto& d : bag.all()) what += "\n  " + m2a::format_diagnostic(d);
        throw std::runtime_error(what);
    }
    return mods[0];
}

inline m2a::MaudeModule parse_fixture(const std::string& name) {
    return parse_one(slurp(fixture_path(name)));
}

// Parse + translate a fixture that is expected to succeed.
inline m2a::Translation translate_fixture(const std::string& name,
                                          m2a::TranslateOptions opts = {}) {
    m2a::DiagnosticBag bag;
    auto tr = m2a::translate(parse_fixture(name), bag, opts);
    if (!tr || bag.has_errors()) {
        std::string what = "translate_fixture failed:";
        for (const auto& d : bag.all()) what += "\n  " + m2a::format_diagnostic(d);
        throw std::runtime_error(what);
    }
    return *tr;
}

// True when `needle` occurs as a contiguous subsequence of `haystack`.
inline bool token_subsequence(const std::vector<std::string>& haystack,
                              const std::vector<std::string>& needle) {
    if (needle.empty()) return true;
    if (haystack.size() < needle.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < needle.size() && all; ++j) all = haystack[i + j] == needle[j];
        if (all) return true;
    }
    return false;
}

// Ground term builders for oracle tests.
inline m2a::TermPtr app(const std::string& name, std::vector<m2a::TermPtr> args = {}) {
    return m2a::make_app(name, std::move(args));
}

// Builds and least-sorts a ground term against a module.
inline m2a::TermPtr ground(m2a::TermPtr t, const m2a::MaudeModule& m, const m2a::SortPoset& p) {
    m2a::DiagnosticBag bag;
    if (m2a::least_sort(t, m, p, bag).empty())
        throw std::runtime_error("ground term does not sort");
    return t;
}

} // namespace testutil
