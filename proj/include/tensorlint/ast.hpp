// AST for the supported Python subset.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tensorlint/source_span.hpp"

namespace tensorlint {

enum class AstKind {
    Module,
    FunctionDef,
    ClassDef,
    If,
    While,
    With,
    Return,
    Assign,
    AugAssign,
    ExprStmt,
    Pass,
    Call,
    Attribute,
    Subscript,
    Name,
    Constant,
    ListLit,
    DictLit,
    TupleLit,
    BinOp,
    UnaryOp,
    Compare,
    Import,
    ImportFrom,
    // Helper nodes that only occur under a specific parent.
    Keyword,  // Call: name=value
    Param,    // FunctionDef: name[=default]
    Alias,    // Import/ImportFrom: name [as asname]
};

const char* to_string(AstKind kind);

struct NoneLiteral {
    bool operator==(const NoneLiteral&) const = default;
};

/// Constant payload. Strings hold decoded text.
using Literal = std::variant<NoneLiteral, bool, std::int64_t, double, std::string>;

struct AstNode;
using AstPtr = std::unique_ptr<AstNode>;

/// One uniform node type; the meaning of each field depends on `kind`.
///
///   Module       body = statements
///   FunctionDef  text = name, children = Param..., body
///   ClassDef     text = name, children = bases, body
///   If           children = [test], body, orelse (elif nests an If)
///   While        children = [test], body
///   With         children = [context, optional target], body
///   Return       children = [] or [value]
///   Assign       children = targets..., value (last)
///   AugAssign    text = operator ("+"), children = [target, value]
///   ExprStmt     children = [value]
///   Call         children = [callee, positional..., Keyword...]
///   Attribute    text = attribute, children = [object]
///   Subscript    children = [object, index]
///   Name         text = identifier
///   Constant     literal
///   ListLit      children = elements      TupleLit likewise
///   DictLit      children = [k0, v0, k1, v1, ...]
///   BinOp        text = operator (including "and"/"or"), children = [lhs, rhs]
///   UnaryOp      text = operator ("-", "+", "~", "not"), children = [operand]
///   Compare      ops, children = [left, right...]
///   Import       children = Alias...
///   ImportFrom   text = module, children = Alias...
///   Keyword      text = name, children = [value]
///   Param        text = name, children = [] or [default]
///   Alias        text = dotted name, alias = asname or ""
struct AstNode {
    AstKind kind = AstKind::Pass;
    SourceSpan span;
    std::string text;
    std::string alias;
    Literal literal;
    std::vector<std::string> ops;
    std::vector<AstPtr> children;
    std::vector<AstPtr> body;
    std::vector<AstPtr> orelse;

    AstNode() = default;
    AstNode(AstKind k, SourceSpan s) : kind(k), span(std::move(s)) {}
};

AstPtr make_node(AstKind kind, const SourceSpan& span);

/// Structural equality that ignores spans.
bool equal_ignoring_spans(const AstNode& a, const AstNode& b);

/// Deep copy.
AstPtr clone(const AstNode& node);

/// Render the tree back to Python source in the supported subset. Parsing the
/// result yields a tree equal to `node` under equal_ignoring_spans.
std::string unparse(const AstNode& module);

/// Compact s-expression form used by tests, e.g. Module[Assign(Name x, Constant 1)].
std::string dump_tree(const AstNode& node);

}  // namespace tensorlint
