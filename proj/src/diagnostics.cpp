#include "tensorlint/diagnostics.hpp"

#include <algorithm>
#include <tuple>

namespace tensorlint {

const char* to_string(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Info: return "info";
    }
    return "?";
}

void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.span.file, a.span.line_start, a.span.col_start, a.code, a.message) <
               std::tie(b.span.file, b.span.line_start, b.span.col_start, b.code, b.message);
    });
    diags.erase(std::unique(diags.begin(), diags.end()), diags.end());
}

std::string format_diagnostic(const Diagnostic& d) {
    return to_string(d.span) + ": " + to_string(d.severity) + " " + d.code + ": " + d.message;
}

}  // namespace tensorlint
