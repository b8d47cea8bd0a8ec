#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "m2a/ast.hpp"
#include "m2a/diagnostics.hpp"

namespace m2a {

// Reflexive-transitive subsort order plus its connected components (kinds).
struct SortPoset {
    std::vector<std::string> sorts;                 // module declaration order
    std::unordered_map<std::string, int> index;
    std::vector<std::vector<bool>> leq;             // leq[a][b]: sort a <= sort b
    std::vector<int> component_of;                  // sort -> component id
    std::vector<std::vector<int>> components;       // per component, sorts in declaration order
    std::vector<std::vector<int>> maximal;          // per component, maximal sorts

    int sort_index(const std::string& s) const {
        auto it = index.find(s);
        return it == index.end() ? -1 : it->second;
    }
    bool less_eq(const std::string& a, const std::string& b) const {
        int i = sort_index(a), j = sort_index(b);
        return i >= 0 && j >= 0 && leq[i][j];
    }
    bool strictly_less(const std::string& a, const std::string& b) const {
        return a != b && less_eq(a, b);
    }
    bool same_component(const std::string& a, const std::string& b) const {
        int i = sort_index(a), j = sort_index(b);
        return i >= 0 && j >= 0 && component_of[i] == component_of[j];
    }

    // Kind name: the unique maximal sort of the component, or a synthesized
    // K_<members> name when several maximal sorts exist.
    std::string kind_name(int component) const {
        const auto& maxs = maximal[component];
        if (maxs.size() == 1) return sorts[maxs[0]];
        std::vector<std::string> names;
        for (int m : components[component]) names.push_back(sorts[m]);
        std::sort(names.begin(), names.end());
        std::string k = "K";
        for (const auto& n : names) k += "_" + n;
        return k;
    }
    bool has_synthesized_kind(int component) const { return maximal[component].size() > 1; }

    std::string kind_of_sort(const std::string& s) const {
        int i = sort_index(s);
        return i < 0 ? std::string() : kind_name(component_of[i]);
    }
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void merge(int a, int b) { parent_[find(a)] = find(b); }

private:
    std::vector<int> parent_;
};

} // namespace detail

// Builds the reflexive-transitive closure of the declared subsort pairs,
// rejecting cycles among distinct sorts, and computes kinds by union-find.
inline SortPoset build_poset(const MaudeModule& m, DiagnosticBag& bag) {
    SortPoset p;
    p.sorts = m.sorts;
    for (int i = 0; i < static_cast<int>(p.sorts.size()); ++i) p.index[p.sorts[i]] = i;
    const int n = static_cast<int>(p.sorts.size());
    p.leq.assign(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) p.leq[i][i] = true;

    detail::UnionFind uf(n);
    for (const auto& [sub, super] : m.subsorts) {
        int a = p.sort_index(sub), b = p.sort_index(super);
        if (a < 0) {
            bag.error("undeclared-sort", "subsort declaration uses undeclared sort '" + sub + "'");
            continue;
        }
        if (b < 0) {
            bag.error("undeclared-sort", "subsort declaration uses undeclared sort '" + super + "'");
            continue;
        }
        p.leq[a][b] = true;
        uf.merge(a, b);
    }

    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (p.leq[i][k])
                for (int j = 0; j < n; ++j)
                    if (p.leq[k][j]) p.leq[i][j] = true;

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (p.leq[i][j] && p.leq[j][i]) {
                bag.error("subsort-cycle", "subsort cycle between '" + p.sorts[i] + "' and '" +
                                               p.sorts[j] + "'");
            }

    std::unordered_map<int, int> root_to_component;
    p.component_of.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = uf.find(i);
        auto it = root_to_component.find(r);
        if (it == root_to_component.end()) {
            it = root_to_component.emplace(r, static_cast<int>(p.components.size())).first;
            p.components.emplace_back();
        }
        p.component_of[i] = it->second;
        p.components[it->second].push_back(i);
    }

    p.maximal.resize(p.components.size());
    for (std::size_t c = 0; c < p.components.size(); ++c) {
        for (int i : p.components[c]) {
            bool is_max = true;
            for (int j : p.components[c])
                if (j != i && p.leq[i][j] && !p.leq[j][i]) {
                    is_max = false;
                    break;
                }
            if (is_max) p.maximal[c].push_back(i);
        }
    }
    return p;
}

// All strict pairs of the closure: declared pairs first (source order,
// deduplicated), then the composite pairs in index order.
inline std::vector<std::pair<std::string, std::string>>
strict_cast_pairs(const MaudeModule& m, const SortPoset& p) {
    std::vector<std::pair<std::string, std::string>> out;
    auto seen = [&](const std::string& a, const std::string& b) {
        for (const auto& [x, y] : out)
            if (x == a && y == b) return true;
        return false;
    };
    for (const auto& [sub, super] : m.subsorts)
        if (sub != super && p.strictly_less(sub, super) && !seen(sub, super))
            out.emplace_back(sub, super);
    const int n = static_cast<int>(p.sorts.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && p.leq[i][j] && !p.leq[j][i] && !seen(p.sorts[i], p.sorts[j]))
                out.emplace_back(p.sorts[i], p.sorts[j]);
    return out;
}

} // namespace m2a
