// Coded findings reported by the analyses.
#pragma once

#include <string>
#include <vector>

#include "tensorlint/source_span.hpp"

namespace tensorlint {

enum class Severity { Error, Warning, Info };

const char* to_string(Severity s);

namespace codes {
inline constexpr const char* kUnanalyzed = "ARI000";
inline constexpr const char* kReshapeSize = "ARI001";
inline constexpr const char* kReshapeFactorization = "ARI002";
inline constexpr const char* kConvRank = "ARI003";
inline constexpr const char* kConvLabel = "ARI004";
inline constexpr const char* kElementNotNumeric = "ARI005";
inline constexpr const char* kReshapeWildcard = "ARI006";
inline constexpr const char* kWidening = "ARI007";
inline constexpr const char* kUnresolvedCall = "ARI008";
inline constexpr const char* kUnresolvedSelector = "ARI009";
inline constexpr const char* kPoolRemainder = "ARI010";
inline constexpr const char* kArgumentMismatch = "ARI011";
}  // namespace codes

struct Diagnostic {
    std::string code;
    Severity severity = Severity::Warning;
    std::string message;
    SourceSpan span;
    std::vector<SourceSpan> related;

    bool operator==(const Diagnostic& o) const {
        return code == o.code && severity == o.severity && message == o.message && span == o.span;
    }
};

/// Orders by (file, line, column, code), then message.
void sort_diagnostics(std::vector<Diagnostic>& diags);

/// `file:line:col: severity CODE: message`
std::string format_diagnostic(const Diagnostic& d);

}  // namespace tensorlint
