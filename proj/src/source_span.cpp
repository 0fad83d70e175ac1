#include "tensorlint/source_span.hpp"

#include <tuple>

namespace tensorlint {

namespace {

bool before_or_at(int l1, int c1, int l2, int c2) {
    return std::tie(l1, c1) <= std::tie(l2, c2);
}

}  // namespace

bool SourceSpan::contains(const SourceSpan& inner) const {
    if (inner.file != file) return false;
    return before_or_at(line_start, col_start, inner.line_start, inner.col_start) &&
           before_or_at(inner.line_end, inner.col_end, line_end, col_end);
}

SourceSpan SourceSpan::cover(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan out = a;
    if (!before_or_at(a.line_start, a.col_start, b.line_start, b.col_start)) {
        out.line_start = b.line_start;
        out.col_start = b.col_start;
    }
    if (before_or_at(a.line_end, a.col_end, b.line_end, b.col_end)) {
        out.line_end = b.line_end;
        out.col_end = b.col_end;
    }
    return out;
}

std::string to_string(const SourceSpan& span) {
    return span.file + ":" + std::to_string(span.line_start) + ":" + std::to_string(span.col_start);
}

}  // namespace tensorlint
