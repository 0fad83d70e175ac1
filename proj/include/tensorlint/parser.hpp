// Tokenizer and recursive-descent parser for the Python subset.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "tensorlint/ast.hpp"

namespace tensorlint {

/// Base for errors that carry a source location.
class FrontendError : public std::runtime_error {
public:
    FrontendError(SourceSpan span, const std::string& message)
        : std::runtime_error(to_string(span) + ": " + message), span_(std::move(span)), message_(message) {}

    const SourceSpan& span() const { return span_; }
    const std::string& message() const { return message_; }

private:
    SourceSpan span_;
    std::string message_;
};

/// Malformed input.
class SyntaxError : public FrontendError {
public:
    using FrontendError::FrontendError;
};

/// Valid Python that falls outside the analyzed subset (lambda, try, ...).
class UnsupportedConstruct : public FrontendError {
public:
    UnsupportedConstruct(SourceSpan span, std::string construct)
        : FrontendError(std::move(span), "unsupported construct: " + construct), construct_(std::move(construct)) {}

    const std::string& construct() const { return construct_; }

private:
    std::string construct_;
};

/// Parse `text` as a module. Comments and docstrings are dropped.
/// Throws SyntaxError or UnsupportedConstruct.
AstPtr parse_module(std::string_view text, const std::string& path);

}  // namespace tensorlint
