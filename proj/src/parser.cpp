#include "tensorlint/parser.hpp"

#include <set>

#include "lexer.hpp"

namespace tensorlint {

using detail::TokKind;
using detail::Token;

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "False", "None",   "True",     "and",    "as",   "assert", "async",  "await",  "break",
    "class", "continue", "def",    "del",    "elif", "else",   "except", "finally", "for",
    "from",  "global", "if",       "import", "in",   "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",    "return", "try",  "while",  "with",   "yield",
};

// Statement keywords that are valid Python but outside the subset.
const std::set<std::string, std::less<>> kUnsupportedStatements = {
    "assert", "async", "await", "break", "continue", "del", "except", "finally",
    "for",    "global", "nonlocal", "raise", "try", "yield",
};

const std::set<std::string, std::less<>> kAugOps = {"+=", "-=", "*=", "/=", "//=", "%=", "**=",
                                                    "@=", "&=", "|=", "^=", "<<=", ">>="};

bool is_docstring(const AstNode& stmt) {
    return stmt.kind == AstKind::ExprStmt && stmt.children[0]->kind == AstKind::Constant &&
           std::holds_alternative<std::string>(stmt.children[0]->literal);
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string path) : toks_(std::move(tokens)), path_(std::move(path)) {}

    AstPtr module() {
        SourceSpan start{path_, 1, 1, 1, 1};
        auto mod = make_node(AstKind::Module, start);
        while (peek().kind == TokKind::Newline) ++pos_;
        while (peek().kind != TokKind::End) {
            if (peek().kind == TokKind::Indent) throw SyntaxError(peek().span, "unexpected indent");
            statement(mod->body);
        }
        drop_docstrings(mod->body, mod->span);
        if (!mod->body.empty()) {
            mod->span = SourceSpan::cover(start, mod->body.back()->span);
        }
        return mod;
    }

private:
    std::vector<Token> toks_;
    std::string path_;
    size_t pos_ = 0;

    // ---- token helpers ----
    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& prev() const { return toks_[pos_ - 1]; }
    const Token& next() { return toks_[pos_++]; }

    bool is_op(const char* op, size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == TokKind::Op && t.text == op;
    }
    bool is_kw(const char* kw, size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == TokKind::Name && t.text == kw;
    }
    bool accept_op(const char* op) {
        if (!is_op(op)) return false;
        ++pos_;
        return true;
    }
    bool accept_kw(const char* kw) {
        if (!is_kw(kw)) return false;
        ++pos_;
        return true;
    }
    const Token& expect_op(const char* op) {
        if (!is_op(op)) fail("expected '" + std::string(op) + "'");
        return next();
    }
    const Token& expect_kw(const char* kw) {
        if (!is_kw(kw)) fail("expected '" + std::string(kw) + "'");
        return next();
    }
    std::string expect_name() {
        const Token& t = peek();
        if (t.kind != TokKind::Name || kKeywords.count(t.text)) fail("expected identifier");
        return next().text;
    }
    [[noreturn]] void fail(const std::string& message) const {
        const Token& t = peek();
        std::string got;
        switch (t.kind) {
            case TokKind::Newline: got = "end of line"; break;
            case TokKind::Indent: got = "indent"; break;
            case TokKind::Dedent: got = "dedent"; break;
            case TokKind::End: got = "end of file"; break;
            default: got = "'" + t.text + "'";
        }
        throw SyntaxError(t.span, message + ", got " + got);
    }
    [[noreturn]] void unsupported(const SourceSpan& span, const std::string& what) const {
        throw UnsupportedConstruct(span, what);
    }

    SourceSpan from(const SourceSpan& start) const { return SourceSpan::cover(start, prev().span); }

    // ---- statements ----
    void drop_docstrings(std::vector<AstPtr>& body, const SourceSpan& owner) {
        std::vector<AstPtr> kept;
        for (auto& s : body) {
            if (!is_docstring(*s)) kept.push_back(std::move(s));
        }
        if (kept.empty() && !body.empty()) kept.push_back(make_node(AstKind::Pass, body.front()->span));
        (void)owner;
        body = std::move(kept);
    }

    void statement(std::vector<AstPtr>& out) {
        const Token& t = peek();
        if (t.kind == TokKind::Op && t.text == "@") unsupported(t.span, "decorator");
        if (t.kind == TokKind::Name) {
            if (kUnsupportedStatements.count(t.text)) unsupported(t.span, t.text + " statement");
            if (t.text == "def") {
                out.push_back(function_def());
                return;
            }
            if (t.text == "class") {
                out.push_back(class_def());
                return;
            }
            if (t.text == "if") {
                out.push_back(if_stmt());
                return;
            }
            if (t.text == "while") {
                out.push_back(while_stmt());
                return;
            }
            if (t.text == "with") {
                out.push_back(with_stmt());
                return;
            }
        }
        simple_statements(out);
    }

    void simple_statements(std::vector<AstPtr>& out) {
        out.push_back(simple_statement());
        while (accept_op(";")) {
            if (peek().kind == TokKind::Newline) break;
            out.push_back(simple_statement());
        }
        if (peek().kind != TokKind::Newline) fail("expected end of statement");
        ++pos_;
    }

    AstPtr simple_statement() {
        const Token& t = peek();
        if (t.kind == TokKind::Name && kUnsupportedStatements.count(t.text)) unsupported(t.span, t.text + " statement");
        if (accept_kw("pass")) return make_node(AstKind::Pass, prev().span);
        if (is_kw("return")) {
            auto node = make_node(AstKind::Return, next().span);
            if (peek().kind != TokKind::Newline && !is_op(";")) node->children.push_back(expr_or_tuple());
            node->span = from(node->span);
            return node;
        }
        if (is_kw("import")) return import_stmt();
        if (is_kw("from")) return import_from();

        SourceSpan start = t.span;
        auto first = expr_or_tuple();
        if (peek().kind == TokKind::Op && kAugOps.count(peek().text)) {
            std::string op = next().text;
            op.pop_back();
            check_target(*first);
            if (first->kind == AstKind::TupleLit) unsupported(first->span, "augmented assignment to tuple");
            auto node = make_node(AstKind::AugAssign, start);
            node->text = op;
            node->children.push_back(std::move(first));
            node->children.push_back(expr_or_tuple());
            node->span = from(start);
            return node;
        }
        if (is_op("=")) {
            auto node = make_node(AstKind::Assign, start);
            node->children.push_back(std::move(first));
            while (accept_op("=")) node->children.push_back(expr_or_tuple());
            for (size_t i = 0; i + 1 < node->children.size(); ++i) check_target(*node->children[i]);
            node->span = from(start);
            return node;
        }
        if (is_op(":")) unsupported(peek().span, "annotated assignment");
        auto node = make_node(AstKind::ExprStmt, start);
        node->children.push_back(std::move(first));
        node->span = from(start);
        return node;
    }

    void check_target(const AstNode& target) const {
        switch (target.kind) {
            case AstKind::Name:
            case AstKind::Attribute:
            case AstKind::Subscript:
                return;
            case AstKind::TupleLit:
            case AstKind::ListLit:
                for (const auto& c : target.children) {
                    if (c->kind != AstKind::Name) unsupported(c->span, "nested unpacking target");
                }
                if (target.kind == AstKind::ListLit) unsupported(target.span, "list unpacking target");
                return;
            default:
                throw SyntaxError(target.span, "cannot assign to expression");
        }
    }

    std::string dotted_name() {
        std::string name = expect_name();
        while (accept_op(".")) name += "." + expect_name();
        return name;
    }

    AstPtr alias_node(std::string name, const SourceSpan& start) {
        auto a = make_node(AstKind::Alias, start);
        a->text = std::move(name);
        if (accept_kw("as")) a->alias = expect_name();
        a->span = from(start);
        return a;
    }

    AstPtr import_stmt() {
        auto node = make_node(AstKind::Import, next().span);
        do {
            SourceSpan s = peek().span;
            node->children.push_back(alias_node(dotted_name(), s));
        } while (accept_op(","));
        node->span = from(node->span);
        return node;
    }

    AstPtr import_from() {
        auto node = make_node(AstKind::ImportFrom, next().span);
        if (is_op(".")) unsupported(peek().span, "relative import");
        node->text = dotted_name();
        expect_kw("import");
        if (is_op("*")) unsupported(peek().span, "wildcard import");
        bool paren = accept_op("(");
        do {
            if (paren && is_op(")")) break;
            SourceSpan s = peek().span;
            node->children.push_back(alias_node(expect_name(), s));
        } while (accept_op(","));
        if (paren) expect_op(")");
        node->span = from(node->span);
        return node;
    }

    // Parses ':' NEWLINE INDENT stmts DEDENT, or ':' simple statements.
    void suite(std::vector<AstPtr>& out, const SourceSpan& owner) {
        expect_op(":");
        if (peek().kind != TokKind::Newline) {
            simple_statements(out);
        } else {
            ++pos_;
            if (peek().kind != TokKind::Indent) fail("expected an indented block");
            ++pos_;
            while (peek().kind != TokKind::Dedent && peek().kind != TokKind::End) statement(out);
            if (peek().kind == TokKind::Dedent) ++pos_;
        }
        drop_docstrings(out, owner);
    }

    SourceSpan end_of(const SourceSpan& start, const std::vector<AstPtr>& body) const {
        SourceSpan s = start;
        if (!body.empty()) s = SourceSpan::cover(s, body.back()->span);
        return s;
    }

    AstPtr function_def() {
        auto node = make_node(AstKind::FunctionDef, next().span);
        node->text = expect_name();
        expect_op("(");
        bool seen_default = false;
        while (!is_op(")")) {
            if (is_op("*") || is_op("**")) unsupported(peek().span, "starred parameter");
            SourceSpan ps = peek().span;
            auto p = make_node(AstKind::Param, ps);
            p->text = expect_name();
            if (is_op(":")) unsupported(peek().span, "parameter annotation");
            if (accept_op("=")) {
                p->children.push_back(expr());
                seen_default = true;
            } else if (seen_default) {
                throw SyntaxError(ps, "non-default argument follows default argument");
            }
            p->span = from(ps);
            node->children.push_back(std::move(p));
            if (!accept_op(",")) break;
        }
        expect_op(")");
        if (is_op("->")) unsupported(peek().span, "return annotation");
        suite(node->body, node->span);
        node->span = end_of(node->span, node->body);
        return node;
    }

    AstPtr class_def() {
        auto node = make_node(AstKind::ClassDef, next().span);
        node->text = expect_name();
        if (accept_op("(")) {
            while (!is_op(")")) {
                node->children.push_back(expr());
                if (!accept_op(",")) break;
            }
            expect_op(")");
        }
        if (node->children.size() > 1) unsupported(node->children[1]->span, "multiple inheritance");
        suite(node->body, node->span);
        for (const auto& s : node->body) {
            if (s->kind != AstKind::FunctionDef && s->kind != AstKind::Assign && s->kind != AstKind::Pass) {
                unsupported(s->span, std::string(to_string(s->kind)) + " in class body");
            }
        }
        node->span = end_of(node->span, node->body);
        return node;
    }

    AstPtr if_stmt() {
        auto node = make_node(AstKind::If, next().span);
        node->children.push_back(expr());
        suite(node->body, node->span);
        if (is_kw("elif")) {
            node->orelse.push_back(if_stmt());
        } else if (accept_kw("else")) {
            suite(node->orelse, node->span);
        }
        node->span = end_of(end_of(node->span, node->body), node->orelse);
        return node;
    }

    AstPtr while_stmt() {
        auto node = make_node(AstKind::While, next().span);
        node->children.push_back(expr());
        suite(node->body, node->span);
        if (is_kw("else")) unsupported(peek().span, "while-else");
        node->span = end_of(node->span, node->body);
        return node;
    }

    AstPtr with_stmt() {
        auto node = make_node(AstKind::With, next().span);
        node->children.push_back(expr());
        if (accept_kw("as")) {
            auto target = atom_expr();
            if (target->kind != AstKind::Name) unsupported(target->span, "complex with target");
            node->children.push_back(std::move(target));
        }
        if (is_op(",")) unsupported(peek().span, "multiple with items");
        suite(node->body, node->span);
        node->span = end_of(node->span, node->body);
        return node;
    }

    // ---- expressions ----
    AstPtr expr_or_tuple() {
        SourceSpan start = peek().span;
        auto first = expr();
        if (!is_op(",")) return first;
        auto tup = make_node(AstKind::TupleLit, start);
        tup->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (!starts_expr()) break;
            tup->children.push_back(expr());
        }
        tup->span = from(start);
        return tup;
    }

    bool starts_expr() const {
        const Token& t = peek();
        switch (t.kind) {
            case TokKind::Name:
                return !kKeywords.count(t.text) || t.text == "None" || t.text == "True" || t.text == "False" ||
                       t.text == "not" || t.text == "lambda";
            case TokKind::Int:
            case TokKind::Float:
            case TokKind::String:
                return true;
            case TokKind::Op:
                return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
                       t.text == "~";
            default:
                return false;
        }
    }

    AstPtr expr() {
        if (is_kw("lambda")) unsupported(peek().span, "lambda");
        if (is_kw("yield")) unsupported(peek().span, "yield expression");
        auto e = or_test();
        if (is_kw("if")) unsupported(peek().span, "conditional expression");
        return e;
    }

    AstPtr binary(AstPtr lhs, std::string op, AstPtr rhs) {
        auto node = make_node(AstKind::BinOp, SourceSpan::cover(lhs->span, rhs->span));
        node->text = std::move(op);
        node->children.push_back(std::move(lhs));
        node->children.push_back(std::move(rhs));
        return node;
    }

    AstPtr or_test() {
        auto lhs = and_test();
        while (accept_kw("or")) lhs = binary(std::move(lhs), "or", and_test());
        return lhs;
    }

    AstPtr and_test() {
        auto lhs = not_test();
        while (accept_kw("and")) lhs = binary(std::move(lhs), "and", not_test());
        return lhs;
    }

    AstPtr not_test() {
        if (is_kw("not")) {
            SourceSpan start = next().span;
            auto node = make_node(AstKind::UnaryOp, start);
            node->text = "not";
            node->children.push_back(not_test());
            node->span = from(start);
            return node;
        }
        return comparison();
    }

    bool comparison_op(std::string& op) {
        const Token& t = peek();
        if (t.kind == TokKind::Op &&
            (t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" || t.text == "<=" || t.text == "!=")) {
            op = next().text;
            return true;
        }
        if (is_kw("in")) {
            ++pos_;
            op = "in";
            return true;
        }
        if (is_kw("not") && is_kw("in", 1)) {
            pos_ += 2;
            op = "not in";
            return true;
        }
        if (is_kw("is")) {
            ++pos_;
            op = accept_kw("not") ? "is not" : "is";
            return true;
        }
        return false;
    }

    AstPtr comparison() {
        auto lhs = bitor_expr();
        std::string op;
        if (!comparison_op(op)) return lhs;
        auto node = make_node(AstKind::Compare, lhs->span);
        node->children.push_back(std::move(lhs));
        do {
            node->ops.push_back(op);
            node->children.push_back(bitor_expr());
        } while (comparison_op(op));
        node->span = SourceSpan::cover(node->span, node->children.back()->span);
        return node;
    }

    template <typename Next>
    AstPtr left_assoc(std::initializer_list<const char*> ops, Next next_level) {
        auto lhs = (this->*next_level)();
        while (true) {
            const char* matched = nullptr;
            for (const char* op : ops) {
                if (is_op(op)) matched = op;
            }
            if (!matched) return lhs;
            ++pos_;
            lhs = binary(std::move(lhs), matched, (this->*next_level)());
        }
    }

    AstPtr bitor_expr() { return left_assoc({"|"}, &Parser::bitxor_expr); }
    AstPtr bitxor_expr() { return left_assoc({"^"}, &Parser::bitand_expr); }
    AstPtr bitand_expr() { return left_assoc({"&"}, &Parser::shift_expr); }
    AstPtr shift_expr() { return left_assoc({"<<", ">>"}, &Parser::arith_expr); }
    AstPtr arith_expr() { return left_assoc({"+", "-"}, &Parser::term); }
    AstPtr term() { return left_assoc({"*", "/", "//", "%", "@"}, &Parser::factor); }

    AstPtr factor() {
        if (is_op("-") || is_op("+") || is_op("~")) {
            SourceSpan start = peek().span;
            auto node = make_node(AstKind::UnaryOp, start);
            node->text = next().text;
            node->children.push_back(factor());
            node->span = from(start);
            return node;
        }
        return power();
    }

    AstPtr power() {
        auto base = atom_expr();
        if (accept_op("**")) return binary(std::move(base), "**", factor());
        return base;
    }

    AstPtr atom_expr() {
        auto node = atom();
        while (true) {
            if (is_op("(")) {
                node = call(std::move(node));
            } else if (accept_op(".")) {
                auto attr = make_node(AstKind::Attribute, node->span);
                attr->text = expect_name();
                attr->children.push_back(std::move(node));
                attr->span = from(attr->span);
                node = std::move(attr);
            } else if (accept_op("[")) {
                auto sub = make_node(AstKind::Subscript, node->span);
                sub->children.push_back(std::move(node));
                if (is_op(":")) unsupported(peek().span, "slice");
                sub->children.push_back(expr_or_tuple());
                if (is_op(":")) unsupported(peek().span, "slice");
                expect_op("]");
                sub->span = from(sub->span);
                node = std::move(sub);
            } else {
                return node;
            }
        }
    }

    AstPtr call(AstPtr callee) {
        auto node = make_node(AstKind::Call, callee->span);
        node->children.push_back(std::move(callee));
        expect_op("(");
        bool seen_keyword = false;
        while (!is_op(")")) {
            if (is_op("*") || is_op("**")) unsupported(peek().span, "starred argument");
            if (peek().kind == TokKind::Name && is_op("=", 1) && !kKeywords.count(peek().text)) {
                SourceSpan ks = peek().span;
                auto kw = make_node(AstKind::Keyword, ks);
                kw->text = next().text;
                ++pos_;
                kw->children.push_back(expr());
                kw->span = from(ks);
                for (size_t i = 1; i < node->children.size(); ++i) {
                    if (node->children[i]->kind == AstKind::Keyword && node->children[i]->text == kw->text) {
                        throw SyntaxError(ks, "keyword argument repeated: " + kw->text);
                    }
                }
                node->children.push_back(std::move(kw));
                seen_keyword = true;
            } else {
                auto arg = expr();
                if (is_kw("for")) unsupported(peek().span, "generator expression");
                if (seen_keyword) throw SyntaxError(arg->span, "positional argument follows keyword argument");
                node->children.push_back(std::move(arg));
            }
            if (!accept_op(",")) break;
        }
        expect_op(")");
        node->span = from(node->span);
        return node;
    }

    AstPtr atom() {
        const Token& t = peek();
        switch (t.kind) {
            case TokKind::Int:
            case TokKind::Float: {
                auto node = make_node(AstKind::Constant, t.span);
                node->literal = t.value;
                ++pos_;
                return node;
            }
            case TokKind::String: {
                auto node = make_node(AstKind::Constant, t.span);
                std::string s;
                while (peek().kind == TokKind::String) s += next().text;
                node->literal = std::move(s);
                node->span = from(node->span);
                return node;
            }
            case TokKind::Name: {
                if (t.text == "None" || t.text == "True" || t.text == "False") {
                    auto node = make_node(AstKind::Constant, t.span);
                    if (t.text == "None") {
                        node->literal = NoneLiteral{};
                    } else {
                        node->literal = t.text == "True";
                    }
                    ++pos_;
                    return node;
                }
                if (t.text == "lambda") unsupported(t.span, "lambda");
                if (t.text == "yield") unsupported(t.span, "yield expression");
                if (t.text == "await") unsupported(t.span, "await expression");
                if (kKeywords.count(t.text)) fail("unexpected keyword");
                auto node = make_node(AstKind::Name, t.span);
                node->text = t.text;
                ++pos_;
                return node;
            }
            case TokKind::Op:
                if (t.text == "(") return paren();
                if (t.text == "[") return list_display();
                if (t.text == "{") return dict_display();
                break;
            default:
                break;
        }
        fail("expected expression");
    }

    AstPtr paren() {
        SourceSpan start = next().span;
        if (accept_op(")")) {
            auto tup = make_node(AstKind::TupleLit, from(start));
            return tup;
        }
        auto first = expr();
        if (is_kw("for")) unsupported(peek().span, "generator expression");
        if (accept_op(")")) {
            // Parentheses only group; the node keeps its own span.
            return first;
        }
        auto tup = make_node(AstKind::TupleLit, start);
        tup->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (is_op(")")) break;
            tup->children.push_back(expr());
        }
        expect_op(")");
        tup->span = from(start);
        return tup;
    }

    AstPtr list_display() {
        SourceSpan start = next().span;
        auto node = make_node(AstKind::ListLit, start);
        while (!is_op("]")) {
            node->children.push_back(expr());
            if (is_kw("for")) unsupported(peek().span, "list comprehension");
            if (!accept_op(",")) break;
        }
        expect_op("]");
        node->span = from(start);
        return node;
    }

    AstPtr dict_display() {
        SourceSpan start = next().span;
        auto node = make_node(AstKind::DictLit, start);
        while (!is_op("}")) {
            if (is_op("**")) unsupported(peek().span, "dict unpacking");
            auto key = expr();
            if (!is_op(":")) {
                if (is_kw("for")) unsupported(peek().span, "set comprehension");
                unsupported(key->span, "set literal");
            }
            ++pos_;
            auto value = expr();
            if (is_kw("for")) unsupported(peek().span, "dict comprehension");
            node->children.push_back(std::move(key));
            node->children.push_back(std::move(value));
            if (!accept_op(",")) break;
        }
        expect_op("}");
        node->span = from(start);
        return node;
    }
};

}  // namespace

AstPtr parse_module(std::string_view text, const std::string& path) {
    return Parser(detail::tokenize(text, path), path).module();
}

}  // namespace tensorlint
