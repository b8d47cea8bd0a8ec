#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace m2a {

enum class Severity { Error, Warning, Note };

// Half-open byte range [begin, end) plus the 1-based line/column of begin.
struct Span {
    uint32_t begin = 0;
    uint32_t end = 0;
    uint32_t line = 0;
    uint32_t column = 0;
};

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string rule;    // stable identifier, e.g. "strong-sensibility"
    std::string message;
    std::string file;
    std::optional<Span> span;
};

inline const char* severity_name(Severity s) {
    switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    default: return "note";
    }
}

// Renders "file:line:col: severity: message [rule]".
inline std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream os;
    if (!d.file.empty()) {
        os << d.file << ':';
        if (d.span) os << d.span->line << ':' << d.span->column << ':';
        os << ' ';
    }
    os << severity_name(d.severity) << ": " << d.message;
    if (!d.rule.empty()) os << " [" << d.rule << ']';
    return os.str();
}

// Collects diagnostics for one compilation; never throws on report.
class DiagnosticBag {
public:
    void report(Severity sev, std::string rule, std::string message,
                std::optional<Span> span = std::nullopt) {
        Diagnostic d;
        d.severity = sev;
        d.rule = std::move(rule);
        d.message = std::move(message);
        d.file = file_;
        d.span = span;
        diags_.push_back(std::move(d));
    }

    void error(std::string rule, std::string message, std::optional<Span> span = std::nullopt) {
        report(Severity::Error, std::move(rule), std::move(message), span);
    }
    void warning(std::string rule, std::string message, std::optional<Span> span = std::nullopt) {
        report(Severity::Warning, std::move(rule), std::move(message), span);
    }

    void set_file(std::string file) { file_ = std::move(file); }
    const std::string& file() const { return file_; }

    bool has_errors() const {
        for (const auto& d : diags_)
            if (d.severity == Severity::Error) return true;
        return false;
    }
    bool has_warnings() const {
        for (const auto& d : diags_)
            if (d.severity == Severity::Warning) return true;
        return false;
    }

    const std::vector<Diagnostic>& all() const { return diags_; }
    std::size_t size() const { return diags_.size(); }
    bool empty() const { return diags_.empty(); }
    void clear() { diags_.clear(); }

private:
    std::string file_;
    std::vector<Diagnostic> diags_;
};

} // namespace m2a
