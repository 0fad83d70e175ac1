// Internal tokenizer used by the parser.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tensorlint/ast.hpp"

namespace tensorlint::detail {

enum class TokKind { Name, Int, Float, String, Op, Newline, Indent, Dedent, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;    // identifier, operator, or decoded string
    Literal value;       // numeric payload for Int/Float
    SourceSpan span;
};

/// Splits the source into tokens, emitting INDENT/DEDENT and logical
/// NEWLINE tokens. Lines inside brackets are joined.
std::vector<Token> tokenize(std::string_view text, const std::string& path);

}  // namespace tensorlint::detail
