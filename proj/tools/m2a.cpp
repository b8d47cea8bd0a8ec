#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "m2a/m2a.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kDisagreement = 3 };

// M2A_COLOR=never|auto|always; auto means "stderr is a terminal".
bool use_color() {
    const char* env = std::getenv("M2A_COLOR");
    std::string v = env ? env : "auto";
    if (v == "always") return true;
    if (v == "never") return false;
    return isatty(fileno(stderr)) != 0;
}

void print_diagnostics(const m2a::DiagnosticBag& bag) {
    const bool color = use_color();
    for (const auto& d : bag.all()) {
        std::string line = m2a::format_diagnostic(d);
        if (color) {
            const char* code = d.severity == m2a::Severity::Error     ? "\033[31m"
                               : d.severity == m2a::Severity::Warning ? "\033[33m"
                                                                      : "\033[36m";
            std::cerr << code << line << "\033[0m\n";
        } else {
            std::cerr << line << "\n";
        }
    }
}

json diagnostics_json(const m2a::DiagnosticBag& bag) {
    json out = json::array();
    for (const auto& d : bag.all()) {
        json j;
        j["severity"] = m2a::severity_name(d.severity);
        j["rule"] = d.rule;
        j["message"] = d.message;
        j["file"] = d.file;
        if (d.span) {
            j["line"] = d.span->line;
            j["column"] = d.span->column;
        }
        out.push_back(std::move(j));
    }
    return out;
}

struct FileJob {
    std::string path;
    std::string text;
    bool read_ok = false;
    m2a::DiagnosticBag bag;
    std::vector<m2a::MaudeModule> modules;
};

// Reads and parses every input concurrently; diagnostics stay grouped per
// file in input order.
std::vector<FileJob> parse_inputs(const std::vector<std::string>& paths, bool builtins) {
    std::vector<std::future<FileJob>> futures;
    futures.reserve(paths.size());
    for (const auto& p : paths)
        futures.push_back(std::async(std::launch::async, [p, builtins] {
            FileJob job;
            job.path = p;
            job.bag.set_file(p);
            std::ifstream in(p, std::ios::binary);
            if (!in) {
                job.bag.error("file-error", "cannot open input file");
                return job;
            }
            std::ostringstream os;
            os << in.rdbuf();
            job.text = os.str();
            job.read_ok = true;
            job.modules = m2a::parse_source(job.text, job.bag, builtins);
            return job;
        }));
    std::vector<FileJob> jobs;
    jobs.reserve(paths.size());
    for (auto& f : futures) jobs.push_back(f.get());
    return jobs;
}

bool failed(const m2a::DiagnosticBag& bag, bool strict) {
    return bag.has_errors() || (strict && bag.has_warnings());
}

int run_translate(const std::vector<std::string>& inputs, const std::string& outdir,
                  bool induction, bool builtins, bool strict, bool json_out) {
    fs::path out(outdir.empty() ? "." : outdir);
    std::error_code ec;
    fs::create_directories(out, ec);

    json report;
    report["tool"] = m2a::tool_name;
    report["version"] = m2a::version_string;
    report["command"] = "translate";
    report["files"] = json::array();

    bool ok = true;
    for (auto& job : parse_inputs(inputs, builtins)) {
        json jfile;
        jfile["path"] = job.path;
        jfile["modules"] = json::array();
        m2a::TranslateOptions opts;
        opts.induction = induction;
        for (const auto& mod : job.modules) {
            json jmod;
            jmod["name"] = mod.name;
            jmod["ok"] = false;
            auto tr = m2a::translate(mod, job.bag, opts);
            if (tr && !failed(job.bag, strict)) {
                fs::path dest = out / (mod.name + ".ath");
                std::ofstream os(dest, std::ios::binary);
                os << m2a::emit_theory(tr->theory);
                if (os) {
                    jmod["ok"] = true;
                    jmod["output"] = dest.string();
                } else {
                    job.bag.error("file-error", "cannot write '" + dest.string() + "'");
                }
            }
            jfile["modules"].push_back(std::move(jmod));
        }
        print_diagnostics(job.bag);
        jfile["diagnostics"] = diagnostics_json(job.bag);
        ok = ok && job.read_ok && !failed(job.bag, strict);
        report["files"].push_back(std::move(jfile));
    }
    report["ok"] = ok;
    if (json_out) std::cout << report.dump(2) << "\n";
    return ok ? kOk : kFailure;
}

int run_check(const std::vector<std::string>& inputs, bool builtins, bool strict, bool json_out) {
    json report;
    report["tool"] = m2a::tool_name;
    report["version"] = m2a::version_string;
    report["command"] = "check";
    report["modules"] = json::array();

    bool ok = true;
    for (auto& job : parse_inputs(inputs, builtins)) {
        for (const auto& mod : job.modules) {
            m2a::SortPoset poset = m2a::build_poset(mod, job.bag);
            json jmod;
            jmod["name"] = mod.name;
            if (job.bag.has_errors()) {
                jmod["strongly_sensible"] = false;
                jmod["maximal_bounding"] = false;
                report["modules"].push_back(std::move(jmod));
                continue;
            }
            auto classes = m2a::ac_classes(mod, poset);
            auto rep = m2a::check_strict_sensibility(classes, mod);
            for (const auto& d : rep.violations) job.bag.report(d.severity, d.rule, d.message, d.span);
            jmod["strongly_sensible"] = rep.strongly_sensible;
            jmod["maximal_bounding"] = rep.maximal_bounding;
            jmod["strictly_sensible"] = rep.strictly_sensible();
            if (!json_out) {
                std::cout << "module " << mod.name << ": "
                          << (rep.strongly_sensible ? "strongly sensible"
                                                    : "NOT strongly sensible")
                          << ", "
                          << (rep.maximal_bounding ? "maximal argument-bounding"
                                                   : "NOT maximal argument-bounding")
                          << "\n";
            }
            ok = ok && rep.strictly_sensible();
            report["modules"].push_back(std::move(jmod));
        }
        print_diagnostics(job.bag);
        ok = ok && job.read_ok && !failed(job.bag, strict);
    }
    report["ok"] = ok;
    if (json_out) std::cout << report.dump(2) << "\n";
    return ok ? kOk : kFailure;
}

int run_verify(const std::vector<std::string>& inputs, bool builtins, bool strict, bool json_out,
               std::uint64_t seed, int depth, int pairs) {
    json report;
    report["tool"] = m2a::tool_name;
    report["version"] = m2a::version_string;
    report["command"] = "verify";
    report["seed"] = seed;
    report["depth"] = depth;
    report["pairs"] = pairs;
    report["modules"] = json::array();

    bool ok = true;
    bool disagreed = false;
    for (auto& job : parse_inputs(inputs, builtins)) {
        for (const auto& mod : job.modules) {
            auto tr = m2a::translate(mod, job.bag);
            if (!tr || failed(job.bag, strict)) {
                ok = false;
                continue;
            }
            m2a::OracleBudget budget;
            budget.seed = seed;
            budget.max_depth = depth;
            m2a::VerifyReport vr = m2a::verify_equivalence(*tr, budget, pairs, depth);
            json jmod;
            jmod["name"] = mod.name;
            jmod["pairs"] = vr.pairs;
            jmod["agreements"] = vr.agreements;
            jmod["disagreements"] = vr.disagreements;
            jmod["inconclusive"] = vr.inconclusive;
            jmod["kinds"] = json::array();
            for (const auto& kr : vr.kinds) {
                json jk;
                jk["kind"] = kr.kind;
                jk["pairs"] = kr.pairs;
                jk["agreements"] = kr.agreements;
                jk["disagreements"] = kr.disagreements;
                jk["inconclusive"] = kr.inconclusive;
                jmod["kinds"].push_back(std::move(jk));
            }
            report["modules"].push_back(std::move(jmod));
            if (!json_out) {
                std::cout << "module " << mod.name << ": pairs=" << vr.pairs
                          << " agreements=" << vr.agreements
                          << " disagreements=" << vr.disagreements
                          << " inconclusive=" << vr.inconclusive << " (seed=" << seed << ")\n";
            }
            disagreed = disagreed || !vr.ok();
        }
        print_diagnostics(job.bag);
        ok = ok && job.read_ok && !failed(job.bag, strict);
    }
    report["ok"] = ok && !disagreed;
    if (json_out) std::cout << report.dump(2) << "\n";
    if (!ok) return kFailure;
    return disagreed ? kDisagreement : kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Translates order-sorted equational modules to many-sorted proof-assistant "
                 "theories and property-tests the translation"};
    app.set_version_flag("--version", std::string(m2a::tool_name) + " " + m2a::version_string);
    app.require_subcommand(1);

    std::vector<std::string> inputs;
    std::string outdir;
    bool no_induction = false;
    bool json_out = false;
    bool strict = false;
    bool builtins = true;
    std::uint64_t seed = 0;
    int depth = 4;
    int pairs = 100;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("inputs", inputs, "input .maude files")->required();
        cmd->add_flag("--json", json_out, "machine-readable report on standard output");
        cmd->add_flag("--strict", strict, "treat warnings as errors");
        cmd->add_flag("--builtins,!--no-builtins", builtins,
                      "splice built-in module stubs for protecting imports (default: on)");
    };

    CLI::App* translate = app.add_subcommand("translate", "translate modules to theory files");
    add_common(translate);
    translate->add_option("-o,--output", outdir, "output directory (default: current)");
    translate->add_flag("--no-induction", no_induction, "omit structural induction methods");

    CLI::App* check = app.add_subcommand("check", "report signature sensibility");
    add_common(check);

    CLI::App* verify = app.add_subcommand("verify", "property-test source/target agreement");
    add_common(verify);
    verify->add_option("--seed", seed, "sampling seed (default: 0)");
    verify->add_option("--depth", depth, "term sampling and search depth (default: 4)")
        ->check(CLI::PositiveNumber);
    verify->add_option("--pairs", pairs, "pairs sampled per kind (default: 100)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (translate->parsed())
        return run_translate(inputs, outdir, !no_induction, builtins, strict, json_out);
    if (check->parsed()) return run_check(inputs, builtins, strict, json_out);
    return run_verify(inputs, builtins, strict, json_out, seed, depth, pairs);
}
