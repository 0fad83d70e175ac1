#include "tensorlint/ast.hpp"

#include <charconv>
#include <sstream>

namespace tensorlint {

const char* to_string(AstKind kind) {
    switch (kind) {
        case AstKind::Module: return "Module";
        case AstKind::FunctionDef: return "FunctionDef";
        case AstKind::ClassDef: return "ClassDef";
        case AstKind::If: return "If";
        case AstKind::While: return "While";
        case AstKind::With: return "With";
        case AstKind::Return: return "Return";
        case AstKind::Assign: return "Assign";
        case AstKind::AugAssign: return "AugAssign";
        case AstKind::ExprStmt: return "ExprStmt";
        case AstKind::Pass: return "Pass";
        case AstKind::Call: return "Call";
        case AstKind::Attribute: return "Attribute";
        case AstKind::Subscript: return "Subscript";
        case AstKind::Name: return "Name";
        case AstKind::Constant: return "Constant";
        case AstKind::ListLit: return "ListLit";
        case AstKind::DictLit: return "DictLit";
        case AstKind::TupleLit: return "TupleLit";
        case AstKind::BinOp: return "BinOp";
        case AstKind::UnaryOp: return "UnaryOp";
        case AstKind::Compare: return "Compare";
        case AstKind::Import: return "Import";
        case AstKind::ImportFrom: return "ImportFrom";
        case AstKind::Keyword: return "Keyword";
        case AstKind::Param: return "Param";
        case AstKind::Alias: return "Alias";
    }
    return "?";
}

AstPtr make_node(AstKind kind, const SourceSpan& span) {
    return std::make_unique<AstNode>(kind, span);
}

namespace {

bool equal_lists(const std::vector<AstPtr>& a, const std::vector<AstPtr>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (!equal_ignoring_spans(*a[i], *b[i])) return false;
    }
    return true;
}

std::vector<AstPtr> clone_list(const std::vector<AstPtr>& nodes) {
    std::vector<AstPtr> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(clone(*n));
    return out;
}

std::string quote(const std::string& s) {
    std::string out = "'";
    for (unsigned char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\'': out += "\\'"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20 || c == 0x7f) {
                    static const char* hex = "0123456789abcdef";
                    out += "\\x";
                    out += hex[c >> 4];
                    out += hex[c & 0xf];
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += "'";
    return out;
}

std::string format_double(double d) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string literal_source(const Literal& lit) {
    struct Visitor {
        std::string operator()(NoneLiteral) const { return "None"; }
        std::string operator()(bool b) const { return b ? "True" : "False"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const { return quote(s); }
    };
    return std::visit(Visitor{}, lit);
}

class Unparser {
public:
    std::string run(const AstNode& module) {
        for (const auto& stmt : module.body) statement(*stmt, 0);
        return out_.str();
    }

private:
    std::ostringstream out_;

    void indent(int depth) {
        for (int i = 0; i < depth; ++i) out_ << "    ";
    }

    void block(const std::vector<AstPtr>& stmts, int depth) {
        for (const auto& s : stmts) statement(*s, depth);
    }

    void statement(const AstNode& n, int depth) {
        indent(depth);
        switch (n.kind) {
            case AstKind::FunctionDef: {
                out_ << "def " << n.text << "(";
                for (size_t i = 0; i < n.children.size(); ++i) {
                    if (i) out_ << ", ";
                    const AstNode& p = *n.children[i];
                    out_ << p.text;
                    if (!p.children.empty()) out_ << "=" << expr(*p.children[0]);
                }
                out_ << "):\n";
                block(n.body, depth + 1);
                return;
            }
            case AstKind::ClassDef: {
                out_ << "class " << n.text;
                if (!n.children.empty()) {
                    out_ << "(";
                    for (size_t i = 0; i < n.children.size(); ++i) {
                        if (i) out_ << ", ";
                        out_ << expr(*n.children[i]);
                    }
                    out_ << ")";
                }
                out_ << ":\n";
                block(n.body, depth + 1);
                return;
            }
            case AstKind::If:
                out_ << "if " << expr(*n.children[0]) << ":\n";
                block(n.body, depth + 1);
                if (!n.orelse.empty()) {
                    indent(depth);
                    out_ << "else:\n";
                    block(n.orelse, depth + 1);
                }
                return;
            case AstKind::While:
                out_ << "while " << expr(*n.children[0]) << ":\n";
                block(n.body, depth + 1);
                return;
            case AstKind::With:
                out_ << "with " << expr(*n.children[0]);
                if (n.children.size() > 1) out_ << " as " << expr(*n.children[1]);
                out_ << ":\n";
                block(n.body, depth + 1);
                return;
            case AstKind::Return:
                out_ << "return";
                if (!n.children.empty()) out_ << " " << expr(*n.children[0]);
                out_ << "\n";
                return;
            case AstKind::Assign:
                for (size_t i = 0; i + 1 < n.children.size(); ++i) out_ << expr(*n.children[i]) << " = ";
                out_ << expr(*n.children.back()) << "\n";
                return;
            case AstKind::AugAssign:
                out_ << expr(*n.children[0]) << " " << n.text << "= " << expr(*n.children[1]) << "\n";
                return;
            case AstKind::ExprStmt:
                out_ << expr(*n.children[0]) << "\n";
                return;
            case AstKind::Pass:
                out_ << "pass\n";
                return;
            case AstKind::Import:
                out_ << "import " << aliases(n) << "\n";
                return;
            case AstKind::ImportFrom:
                out_ << "from " << n.text << " import " << aliases(n) << "\n";
                return;
            default:
                out_ << expr(n) << "\n";
        }
    }

    static std::string aliases(const AstNode& n) {
        std::string s;
        for (size_t i = 0; i < n.children.size(); ++i) {
            if (i) s += ", ";
            s += n.children[i]->text;
            if (!n.children[i]->alias.empty()) s += " as " + n.children[i]->alias;
        }
        return s;
    }

    static std::string join(const std::vector<AstPtr>& nodes, size_t from, size_t to) {
        std::string s;
        for (size_t i = from; i < to; ++i) {
            if (i > from) s += ", ";
            s += expr(*nodes[i]);
        }
        return s;
    }

    static std::string expr(const AstNode& n) {
        switch (n.kind) {
            case AstKind::Name: return n.text;
            case AstKind::Constant: return literal_source(n.literal);
            case AstKind::Attribute: return expr(*n.children[0]) + "." + n.text;
            case AstKind::Subscript: return expr(*n.children[0]) + "[" + expr(*n.children[1]) + "]";
            case AstKind::Call: {
                std::string s = expr(*n.children[0]) + "(";
                for (size_t i = 1; i < n.children.size(); ++i) {
                    if (i > 1) s += ", ";
                    const AstNode& a = *n.children[i];
                    if (a.kind == AstKind::Keyword) {
                        s += a.text + "=" + expr(*a.children[0]);
                    } else {
                        s += expr(a);
                    }
                }
                return s + ")";
            }
            case AstKind::ListLit: return "[" + join(n.children, 0, n.children.size()) + "]";
            case AstKind::TupleLit:
                if (n.children.size() == 1) return "(" + expr(*n.children[0]) + ",)";
                return "(" + join(n.children, 0, n.children.size()) + ")";
            case AstKind::DictLit: {
                std::string s = "{";
                for (size_t i = 0; i + 1 < n.children.size(); i += 2) {
                    if (i) s += ", ";
                    s += expr(*n.children[i]) + ": " + expr(*n.children[i + 1]);
                }
                return s + "}";
            }
            case AstKind::BinOp:
                return "(" + expr(*n.children[0]) + " " + n.text + " " + expr(*n.children[1]) + ")";
            case AstKind::UnaryOp:
                return "(" + n.text + (n.text == "not" ? " " : "") + expr(*n.children[0]) + ")";
            case AstKind::Compare: {
                std::string s = "(" + expr(*n.children[0]);
                for (size_t i = 0; i < n.ops.size(); ++i) s += " " + n.ops[i] + " " + expr(*n.children[i + 1]);
                return s + ")";
            }
            default: return "<" + std::string(to_string(n.kind)) + ">";
        }
    }
};

void dump_into(const AstNode& n, std::string& out) {
    out += to_string(n.kind);
    switch (n.kind) {
        case AstKind::Constant: out += " " + literal_source(n.literal); break;
        case AstKind::Compare:
            for (const auto& op : n.ops) out += " " + op;
            break;
        case AstKind::Alias:
            out += " " + n.text;
            if (!n.alias.empty()) out += " as " + n.alias;
            break;
        default:
            if (!n.text.empty()) out += " " + n.text;
    }
    auto list = [&](const std::vector<AstPtr>& nodes, const char* open, const char* close) {
        out += open;
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (i) out += ", ";
            dump_into(*nodes[i], out);
        }
        out += close;
    };
    if (!n.children.empty()) list(n.children, "(", ")");
    if (!n.body.empty() || n.kind == AstKind::Module) list(n.body, "[", "]");
    if (!n.orelse.empty()) list(n.orelse, " else[", "]");
}

}  // namespace

bool equal_ignoring_spans(const AstNode& a, const AstNode& b) {
    return a.kind == b.kind && a.text == b.text && a.alias == b.alias && a.literal == b.literal &&
           a.ops == b.ops && equal_lists(a.children, b.children) && equal_lists(a.body, b.body) &&
           equal_lists(a.orelse, b.orelse);
}

AstPtr clone(const AstNode& node) {
    auto out = make_node(node.kind, node.span);
    out->text = node.text;
    out->alias = node.alias;
    out->literal = node.literal;
    out->ops = node.ops;
    out->children = clone_list(node.children);
    out->body = clone_list(node.body);
    out->orelse = clone_list(node.orelse);
    return out;
}

std::string unparse(const AstNode& module) { return Unparser{}.run(module); }

std::string dump_tree(const AstNode& node) {
    std::string out;
    dump_into(node, out);
    return out;
}

}  // namespace tensorlint
