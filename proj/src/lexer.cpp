#include "lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "tensorlint/parser.hpp"

namespace tensorlint::detail {

namespace {

constexpr std::array<std::string_view, 22> kMultiOps = {
    "**=", "//=", ">>=", "<<=", "->", "**", "//", "<<", ">>", "<=", ">=",
    "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "@=",
};

constexpr std::string_view kSingleOps = "+-*/%@&|^~<>()[]{},:.;=";

class Lexer {
public:
    Lexer(std::string_view text, const std::string& path) : src_(text), path_(path) {}

    std::vector<Token> run() {
        indents_.push_back(0);
        at_line_start_ = true;
        while (pos_ < src_.size()) {
            if (at_line_start_ && depth_ == 0) {
                if (handle_indentation()) continue;
            }
            char c = src_[pos_];
            if (c == '\n') {
                newline();
                continue;
            }
            if (c == '\r') {
                ++pos_;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\f') {
                advance();
                continue;
            }
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                continue;
            }
            if (c == '\\') {
                size_t next = pos_ + 1;
                if (next < src_.size() && src_[next] == '\r') ++next;
                if (next < src_.size() && src_[next] == '\n') {
                    pos_ = next + 1;
                    ++line_;
                    col_ = 1;
                    continue;
                }
                throw SyntaxError(point_span(), "unexpected character after line continuation");
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                if (string_prefix()) {
                    lex_string();
                } else {
                    lex_name();
                }
                continue;
            }
            if (c == '\'' || c == '"') {
                lex_string();
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number();
                continue;
            }
            lex_op();
        }
        if (!tokens_.empty() && tokens_.back().kind != TokKind::Newline && tokens_.back().kind != TokKind::Dedent) {
            emit(TokKind::Newline, "", point_span());
        }
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokKind::Dedent, "", point_span());
        }
        emit(TokKind::End, "", point_span());
        return std::move(tokens_);
    }

private:
    std::string_view src_;
    std::string path_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int depth_ = 0;
    bool at_line_start_ = true;
    std::vector<int> indents_;
    std::vector<Token> tokens_;

    SourceSpan span(int l0, int c0, int l1, int c1) const { return SourceSpan{path_, l0, c0, l1, c1}; }
    SourceSpan point_span() const { return span(line_, col_, line_, col_); }

    void advance() {
        ++pos_;
        ++col_;
    }

    void emit(TokKind kind, std::string text, SourceSpan sp, Literal value = NoneLiteral{}) {
        tokens_.push_back(Token{kind, std::move(text), std::move(value), std::move(sp)});
    }

    void newline() {
        if (depth_ == 0 && !tokens_.empty() && tokens_.back().kind != TokKind::Newline &&
            tokens_.back().kind != TokKind::Indent && tokens_.back().kind != TokKind::Dedent) {
            emit(TokKind::Newline, "", point_span());
        }
        ++pos_;
        ++line_;
        col_ = 1;
        if (depth_ == 0) at_line_start_ = true;
    }

    // Returns true when the whole line was blank or a comment and got consumed.
    bool handle_indentation() {
        int width = 0;
        size_t p = pos_;
        while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
            if (src_[p] == '\t') {
                width = (width / 8 + 1) * 8;
            } else if (src_[p] == ' ') {
                ++width;
            }
            ++p;
        }
        if (p < src_.size() && src_[p] == '\r') ++p;
        if (p >= src_.size() || src_[p] == '\n' || src_[p] == '#') {
            // Blank or comment line: no indentation change.
            while (p < src_.size() && src_[p] != '\n') ++p;
            pos_ = p;
            if (pos_ < src_.size()) {
                ++pos_;
                ++line_;
                col_ = 1;
            }
            return true;
        }
        col_ += static_cast<int>(p - pos_);
        pos_ = p;
        at_line_start_ = false;
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokKind::Indent, "", span(line_, 1, line_, col_ > 1 ? col_ - 1 : 1));
        } else {
            while (width < indents_.back()) {
                indents_.pop_back();
                emit(TokKind::Dedent, "", point_span());
            }
            if (width != indents_.back()) throw SyntaxError(point_span(), "unindent does not match any outer indentation level");
        }
        return false;
    }

    bool string_prefix() const {
        size_t p = pos_;
        size_t n = 0;
        while (p < src_.size() && n < 3 && std::isalpha(static_cast<unsigned char>(src_[p]))) {
            ++p;
            ++n;
        }
        if (p >= src_.size() || (src_[p] != '\'' && src_[p] != '"') || n == 0 || n > 2) return false;
        for (size_t i = pos_; i < p; ++i) {
            char c = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[i])));
            if (c != 'r' && c != 'u' && c != 'b' && c != 'f') return false;
        }
        return true;
    }

    void lex_name() {
        int l0 = line_, c0 = col_;
        size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
        emit(TokKind::Name, std::string(src_.substr(start, pos_ - start)), span(l0, c0, line_, col_ - 1));
    }

    void lex_number() {
        int l0 = line_, c0 = col_;
        size_t start = pos_;
        bool is_float = false;
        if (src_[pos_] == '0' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
            advance();
            advance();
            while (pos_ < src_.size() && (std::isxdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
        } else {
            while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
            if (pos_ < src_.size() && src_[pos_] == '.') {
                is_float = true;
                advance();
                while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                size_t p = pos_ + 1;
                if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
                if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                    is_float = true;
                    while (pos_ < p) advance();
                    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
                }
            }
        }
        std::string raw;
        for (size_t i = start; i < pos_; ++i) {
            if (src_[i] != '_') raw += src_[i];
        }
        if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) {
            throw UnsupportedConstruct(span(l0, c0, line_, col_), "complex literal");
        }
        if (!is_float && pos_ < src_.size() && (src_[pos_] == 'L' || src_[pos_] == 'l')) advance();
        SourceSpan sp = span(l0, c0, line_, col_ - 1);
        if (is_float) {
            double d = std::strtod(raw.c_str(), nullptr);
            emit(TokKind::Float, raw, sp, d);
            return;
        }
        std::int64_t v = 0;
        int base = 10;
        std::string_view digits = raw;
        if (raw.size() > 2 && (raw[1] == 'x' || raw[1] == 'X')) {
            base = 16;
            digits = std::string_view(raw).substr(2);
        }
        auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
        if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
            throw SyntaxError(sp, "invalid integer literal '" + raw + "'");
        }
        emit(TokKind::Int, raw, sp, v);
    }

    void lex_string() {
        int l0 = line_, c0 = col_;
        bool raw = false;
        while (src_[pos_] != '\'' && src_[pos_] != '"') {
            char c = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[pos_])));
            if (c == 'f') throw UnsupportedConstruct(point_span(), "f-string");
            if (c == 'r') raw = true;
            advance();
        }
        char q = src_[pos_];
        bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q;
        size_t qlen = triple ? 3 : 1;
        for (size_t i = 0; i < qlen; ++i) advance();
        std::string out;
        while (true) {
            if (pos_ >= src_.size()) throw SyntaxError(span(l0, c0, l0, c0), "unterminated string literal");
            char c = src_[pos_];
            if (c == q) {
                if (!triple) {
                    advance();
                    break;
                }
                if (pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q) {
                    advance();
                    advance();
                    advance();
                    break;
                }
            }
            if (c == '\n') {
                if (!triple) throw SyntaxError(span(l0, c0, line_, col_), "unterminated string literal");
                out += c;
                ++pos_;
                ++line_;
                col_ = 1;
                continue;
            }
            if (c == '\\' && pos_ + 1 < src_.size()) {
                char e = src_[pos_ + 1];
                if (raw) {
                    out += c;
                    out += e;
                    advance();
                    if (e == '\n') {
                        ++pos_;
                        ++line_;
                        col_ = 1;
                    } else {
                        advance();
                    }
                    continue;
                }
                advance();
                switch (e) {
                    case '\n':
                        ++pos_;
                        ++line_;
                        col_ = 1;
                        continue;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '0': out += '\0'; break;
                    case '\\': out += '\\'; break;
                    case '\'': out += '\''; break;
                    case '"': out += '"'; break;
                    case 'x': {
                        if (pos_ + 2 < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_ + 1])) &&
                            std::isxdigit(static_cast<unsigned char>(src_[pos_ + 2]))) {
                            out += static_cast<char>(std::stoi(std::string(src_.substr(pos_ + 1, 2)), nullptr, 16));
                            advance();
                            advance();
                        } else {
                            out += "\\x";
                        }
                        break;
                    }
                    default:
                        out += '\\';
                        out += e;
                }
                advance();
                continue;
            }
            out += c;
            advance();
        }
        emit(TokKind::String, std::move(out), span(l0, c0, line_, col_ - 1));
    }

    void lex_op() {
        int l0 = line_, c0 = col_;
        for (std::string_view op : kMultiOps) {
            if (src_.substr(pos_, op.size()) == op) {
                for (size_t i = 0; i < op.size(); ++i) advance();
                emit(TokKind::Op, std::string(op), span(l0, c0, line_, col_ - 1));
                return;
            }
        }
        char c = src_[pos_];
        if (kSingleOps.find(c) == std::string_view::npos) {
            throw SyntaxError(point_span(), std::string("unexpected character '") + c + "'");
        }
        if (c == '(' || c == '[' || c == '{') ++depth_;
        if (c == ')' || c == ']' || c == '}') {
            if (depth_ == 0) throw SyntaxError(point_span(), std::string("unmatched '") + c + "'");
            --depth_;
        }
        advance();
        emit(TokKind::Op, std::string(1, c), span(l0, c0, l0, c0));
    }
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& path) { return Lexer(text, path).run(); }

}  // namespace tensorlint::detail
