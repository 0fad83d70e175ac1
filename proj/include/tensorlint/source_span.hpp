// Source locations shared by the frontend, the IR and diagnostics.
#pragma once

#include <compare>
#include <string>

namespace tensorlint {

/// A 1-based, inclusive range of source text. `col_end` points at the last
/// character covered, so a one-character token has col_start == col_end.
struct SourceSpan {
    std::string file;
    int line_start = 0;
    int col_start = 0;
    int line_end = 0;
    int col_end = 0;

    bool valid() const {
        if (line_start <= 0 || col_start <= 0) return false;
        if (line_start > line_end) return false;
        return line_start < line_end || col_start <= col_end;
    }

    /// True when `inner` lies entirely inside this span (same file).
    bool contains(const SourceSpan& inner) const;

    /// Smallest span covering both arguments. Both must be in the same file.
    static SourceSpan cover(const SourceSpan& a, const SourceSpan& b);

    auto operator<=>(const SourceSpan&) const = default;
};

std::string to_string(const SourceSpan& span);

}  // namespace tensorlint
