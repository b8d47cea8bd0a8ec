// Acceptance suite: end-to-end checks of the translator, the sensibility
// gate, and the equivalence oracle. Each criterion prints one PASS/FAIL line
// and carries a wall-clock limit; the process exits with the failure count.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace m2a;
using testutil::golden_path;
using testutil::parse_fixture;
using testutil::slurp;
using testutil::token_subsequence;
using testutil::translate_fixture;

namespace {

bool fragment(const std::string& emitted, const std::string& quoted, std::string& detail) {
    if (token_subsequence(tokenize_athena(emitted), tokenize_athena(quoted))) return true;
    detail = "missing fragment: " + quoted;
    return false;
}

// ---- criterion 1: simple Peano becomes a datatype with plain declarations.
bool criterion1(std::string& detail) {
    std::string out = emit_theory(translate_fixture("peano_simple.maude").theory);
    if (!fragment(out, "datatype Nat := zero | (s Nat)", detail)) return false;
    if (!fragment(out, "declare plus : [Nat Nat] -> Nat", detail)) return false;
    // Token-exact against the golden after comment/whitespace normalization.
    if (tokenize_athena(out) != tokenize_athena(slurp(golden_path("PEANO-SIMPLE.ath")))) {
        detail = "token stream differs from PEANO-SIMPLE.ath";
        return false;
    }
    return true;
}

// ---- criterion 2: subsorted Peano gets domains, casts, membership, induction.
bool criterion2(std::string& detail) {
    Translation tr = translate_fixture("peano.maude");
    const TranslatedTheory& th = tr.theory;

    if (th.domains.size() != 1 ||
        th.domains[0].sorts != std::vector<std::string>{"Nat", "Even", "NzNat"}) {
        detail = "expected domains Nat, Even, NzNat";
        return false;
    }
    std::vector<std::string> casts;
    for (const auto& s : th.symbols)
        if (s.role == SymbolRole::Cast) casts.push_back(s.name);
    if (casts != std::vector<std::string>{"Cast_Even_to_Nat", "Cast_NzNat_to_Nat"}) {
        detail = "expected exactly the two casts into Nat";
        return false;
    }
    for (const auto& a : th.assertions)
        if (a.name.rfind("core_eq_", 0) == 0) {
            detail = "unexpected core equality " + a.name;
            return false;
        }
    bool membership = false;
    for (const auto& a : th.assertions)
        membership = membership || (a.is_membership_fact && a.sort == "Even" &&
                                    a.conditions.size() == 1 && a.conditions[0].is_membership);
    if (!membership) {
        detail = "missing guarded membership fact for Even";
        return false;
    }
    std::string out = emit_theory(th);
    if (!fragment(out, "basis := (property (Cast_Even_to_Nat zero))", detail)) return false;
    if (!fragment(out, "ic := (forall x (if (property x) (property (Cast_NzNat_to_Nat (s x)))))",
                  detail))
        return false;
    if (th.methods.size() != 1 || th.methods[0].method_name != "nat-induction") {
        detail = "expected a single nat-induction method";
        return false;
    }
    if (tokenize_athena(out) != tokenize_athena(slurp(golden_path("PEANO.ath")))) {
        detail = "token stream differs from PEANO.ath";
        return false;
    }
    return true;
}

// ---- criterion 3: the compiler module's quoted fragments come out verbatim.
bool criterion3(std::string& detail) {
    Translation tr = translate_fixture("toy_compiler.maude");
    std::string out = emit_theory(tr.theory);
    const char* quoted[] = {
        "assert* eq_4 := ((compile (Cast_Int_to_Exp N)) = (Cast_Instr_to_Program (push N)))",
        "assert* eq_9 := ((exec (++ (Cast_Instr_to_Program (push N)) P) S) = (exec P (:: N S)))",
        "assert* assoc_++ := ((++ (++ _v1 _v2) _v3) = (++ _v1 (++ _v2 _v3)))",
        "assert* left_id_++ := ((++ nil _v4) = _v4)",
        "assert* right_id_++ := ((++ _v4 nil) = _v4)",
        "datatype Stack := empty | (:: Int Stack)",
    };
    for (const char* q : quoted)
        if (!fragment(out, q, detail)) return false;

    if (tr.theory.methods.empty() || tr.theory.methods[0].method_name != "exp-induction") {
        detail = "missing exp-induction method";
        return false;
    }
    std::vector<std::string> names;
    for (const auto& o : tr.theory.methods[0].obligations) names.push_back(o.name);
    if (names != std::vector<std::string>{"basis_n", "ic_plus", "ic_minus", "ic_mult"}) {
        detail = "exp-induction obligations are not basis_n/ic_plus/ic_minus/ic_mult";
        return false;
    }
    return true;
}

// ---- criterion 4: the sensibility gate rejects exactly the bad signatures.
bool criterion4(std::string& detail) {
    auto rejected_with = [&](const char* fixture, const char* rule) {
        DiagnosticBag bag;
        auto tr = translate(parse_fixture(fixture), bag);
        if (tr) {
            detail = std::string(fixture) + " unexpectedly translated";
            return false;
        }
        for (const auto& d : bag.all())
            if (d.rule == rule) return true;
        detail = std::string(fixture) + " lacks diagnostic rule " + rule;
        return false;
    };
    if (!rejected_with("bad_strong.maude", "strong-sensibility")) return false;
    if (!rejected_with("bad_max.maude", "maximal-bounding")) return false;
    for (const char* good : {"peano_simple.maude", "peano.maude", "toy_compiler.maude"}) {
        DiagnosticBag bag;
        MaudeModule m = parse_fixture(good);
        SortPoset p = build_poset(m, bag);
        if (!check_strict_sensibility(ac_classes(m, p), m).strictly_sensible()) {
            detail = std::string(good) + " failed the sensibility gate";
            return false;
        }
    }
    return true;
}

// ---- criterion 5: sampled equality verdicts agree across the translation.
bool criterion5(std::string& detail) {
    Translation tr = translate_fixture("peano.maude");
    OracleBudget budget;
    budget.max_depth = 64;
    budget.max_term_size = 40;
    budget.max_frontier = 100000;
    budget.seed = 17;
    const int pairs = 200;
    VerifyReport report = verify_equivalence(tr, budget, pairs, 4);
    char buf[160];
    std::snprintf(buf, sizeof buf, "pairs=%d agreements=%d disagreements=%d inconclusive=%d",
                  report.pairs, report.agreements, report.disagreements, report.inconclusive);
    detail = buf;
    if (report.pairs != pairs) return false;
    if (report.disagreements != 0) return false;           // zero tolerated
    if (report.inconclusive * 5 > report.pairs) return false; // at most 20%
    return true;
}

// ---- criterion 6: deleting the cast composition law is detected.
bool criterion6(std::string& detail) {
    Translation tr = translate_fixture("chain.maude");
    auto& as = tr.theory.assertions;
    std::size_t before = as.size();
    as.erase(std::remove_if(as.begin(), as.end(),
                            [](const TargetAssertion& a) {
                                return a.name.rfind("core_eq_", 0) == 0;
                            }),
             as.end());
    if (as.size() == before) {
        detail = "no core equality found to delete";
        return false;
    }
    OracleBudget budget;
    budget.seed = 17;
    VerifyReport report = verify_equivalence(tr, budget, 8, 4);
    char buf[96];
    std::snprintf(buf, sizeof buf, "disagreements=%d of %d pairs", report.disagreements,
                  report.pairs);
    detail = buf;
    return report.disagreements >= 1;
}

// ---- criterion 7: constructors plus casts cover every enumerated term.
bool criterion7(std::string& detail) {
    Translation tr = translate_fixture("peano.maude");
    int nat = tr.poset.component_of[tr.poset.sort_index("Nat")];
    ExhaustivenessReport rep = check_joint_exhaustiveness(tr, nat, 5);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d terms enumerated, %d uncovered", rep.terms,
                  static_cast<int>(rep.uncovered.size()));
    detail = buf;
    return rep.terms > 0 && rep.ok();
}

// ---- criterion 8: the command-line translator is deterministic.
bool criterion8(std::string& detail) {
    fs::path root = fs::temp_directory_path() / ("m2a_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const char* corpus[] = {"peano_simple.maude", "peano.maude", "chain.maude",
                            "toy_compiler.maude", "bad_strong.maude", "bad_max.maude"};

    auto run_into = [&](const fs::path& dir) {
        fs::create_directories(dir);
        std::string cmd = std::string(M2A_CLI_PATH) + " translate";
        for (const char* f : corpus) cmd += " " + testutil::fixture_path(f);
        cmd += " -o " + dir.string() + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    auto digest = [](const fs::path& dir) {
        std::map<std::string, std::string> files;
        for (const auto& e : fs::directory_iterator(dir))
            files[e.path().filename().string()] = slurp(e.path().string());
        return files;
    };

    fs::path d1 = root / "run1", d2 = root / "run2";
    int s1 = run_into(d1);
    int s2 = run_into(d2);
    if (!WIFEXITED(s1) || !WIFEXITED(s2) || WEXITSTATUS(s1) != WEXITSTATUS(s2)) {
        detail = "runs exited differently";
        return false;
    }
    auto f1 = digest(d1), f2 = digest(d2);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d files per run", static_cast<int>(f1.size()));
    detail = buf;
    if (f1.empty() || f1 != f2) {
        detail = "outputs differ between runs";
        return false;
    }
    return true;
}

struct Criterion {
    int id;
    const char* label;
    bool (*fn)(std::string&);
    double limit_seconds;
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {1, "simple Peano translates to the expected datatype module", criterion1, 1.0},
        {2, "subsorted Peano gets casts, membership, and nat-induction", criterion2, 1.0},
        {3, "compiler module reproduces the quoted assertions", criterion3, 2.0},
        {4, "sensibility gate rejects bad signatures, passes good ones", criterion4, 1.0},
        {5, "source and target equality verdicts agree on 200 sampled pairs", criterion5, 60.0},
        {6, "verification detects a deleted cast composition law", criterion6, 30.0},
        {7, "constructor terms of kind Nat to depth 5 are jointly covered", criterion7, 5.0},
        {8, "repeated command-line translation is byte-identical", criterion8, 5.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        auto start = std::chrono::steady_clock::now();
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        bool in_time = secs < c.limit_seconds;
        bool pass = ok && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s criterion %d: %s (%.2fs, limit %.0fs)%s%s\n", pass ? "PASS" : "FAIL",
                    c.id, c.label, secs, c.limit_seconds,
                    detail.empty() ? "" : " -- ", detail.c_str());
        if (ok && !in_time) std::printf("     criterion %d exceeded its time limit\n", c.id);
    }
    return failures;
}
