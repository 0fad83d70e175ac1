#include "tensorlint/lowering.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>

namespace tensorlint {

using namespace ir;

std::string module_init_name(const std::string& module) { return module + ".<module>"; }

std::string constructor_name(const std::string& qualified_class) { return qualified_class + ".<new>"; }

std::string module_name_for_path(const std::string& path) {
    std::string stem = std::filesystem::path(path).stem().string();
    return stem.empty() ? "main" : stem;
}

IRFunction synthesize_class_model(const std::string& qualified_class, const std::string& module,
                                  const std::vector<MethodBinding>& methods, const SourceSpan& span) {
    FunctionBuilder b(constructor_name(qualified_class), FunctionKind::Constructor, module, span);
    b.function().declared_class = qualified_class;
    b.add_param("", span);
    ValueId self = b.new_value(span, "self");
    b.emit(New{self, "instance:" + qualified_class, b.next_site(), std::nullopt}, span);
    for (const auto& m : methods) {
        ValueId t = b.new_value(span, m.field);
        b.emit(New{t, "trampoline:" + m.target, b.next_site(), std::nullopt}, span);
        b.emit(PutField{self, m.field, t}, span);
    }
    b.emit(Return{self}, span);
    return b.take();
}

namespace {

void collect_target(const AstNode& target, std::set<std::string>& out) {
    if (target.kind == AstKind::Name) out.insert(target.text);
    if (target.kind == AstKind::TupleLit || target.kind == AstKind::ListLit) {
        for (const auto& c : target.children) collect_target(*c, out);
    }
}

std::string first_component(const std::string& dotted) { return dotted.substr(0, dotted.find('.')); }

std::vector<std::string> split_dotted(const std::string& dotted) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t dot = dotted.find('.', start);
        parts.push_back(dotted.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return parts;
}

/// Names bound anywhere in `stmts`, without descending into nested scopes.
void collect_assigned(const std::vector<AstPtr>& stmts, std::set<std::string>& out) {
    for (const auto& s : stmts) {
        switch (s->kind) {
            case AstKind::Assign:
                for (size_t i = 0; i + 1 < s->children.size(); ++i) collect_target(*s->children[i], out);
                break;
            case AstKind::AugAssign:
                collect_target(*s->children[0], out);
                break;
            case AstKind::With:
                if (s->children.size() > 1) collect_target(*s->children[1], out);
                collect_assigned(s->body, out);
                break;
            case AstKind::If:
                collect_assigned(s->body, out);
                collect_assigned(s->orelse, out);
                break;
            case AstKind::While:
                collect_assigned(s->body, out);
                collect_assigned(s->orelse, out);
                break;
            case AstKind::FunctionDef:
            case AstKind::ClassDef:
                out.insert(s->text);
                break;
            case AstKind::Import:
                for (const auto& a : s->children) out.insert(a->alias.empty() ? first_component(a->text) : a->alias);
                break;
            case AstKind::ImportFrom:
                for (const auto& a : s->children) out.insert(a->alias.empty() ? a->text : a->alias);
                break;
            default:
                break;
        }
    }
}

bool shape_element(const AstNode& e, std::optional<std::int64_t>& out) {
    if (e.kind == AstKind::Constant) {
        if (std::holds_alternative<NoneLiteral>(e.literal)) {
            out = std::nullopt;
            return true;
        }
        if (const auto* i = std::get_if<std::int64_t>(&e.literal)) {
            out = *i;
            return true;
        }
        return false;
    }
    if (e.kind == AstKind::UnaryOp && e.text == "-" && e.children.size() == 1 &&
        e.children[0]->kind == AstKind::Constant) {
        if (const auto* i = std::get_if<std::int64_t>(&e.children[0]->literal)) {
            out = -*i;
            return true;
        }
    }
    return false;
}

struct ModuleContext {
    std::string module;
    std::vector<IRFunction> functions;
    std::map<std::string, std::vector<MethodBinding>> class_methods;  // by simple class name
};

using Env = std::map<std::string, ValueId>;

class FunctionLowerer {
public:
    FunctionLowerer(ModuleContext& ctx, std::string name, FunctionKind kind, const SourceSpan& span,
                    bool module_scope)
        : ctx_(ctx), b_(std::move(name), kind, ctx.module, span), module_scope_(module_scope) {}

    FunctionBuilder& builder() { return b_; }

    void set_locals(std::set<std::string> locals) { locals_ = std::move(locals); }

    void bind_param(const std::string& name, ValueId v) { env_[name] = v; }

    void lower_body(const std::vector<AstPtr>& stmts) {
        for (const auto& s : stmts) statement(*s);
    }

    IRFunction finish(const SourceSpan& span) {
        IRFunction& fn = b_.function();
        for (size_t i = 0; i < fn.blocks.size(); ++i) {
            BlockId id{static_cast<int>(i)};
            b_.set_block(id);
            if (!b_.terminated()) {
                ValueId none = constant(NoneLiteral{}, span);
                b_.emit(Return{none}, span);
            }
        }
        return b_.take();
    }

private:
    ModuleContext& ctx_;
    FunctionBuilder b_;
    bool module_scope_;
    std::set<std::string> locals_;
    Env env_;
    bool dead_ = false;

    [[noreturn]] static void unsupported(const AstNode& n, const std::string& what) {
        throw UnsupportedConstruct(n.span, what);
    }

    ValueId constant(Literal lit, const SourceSpan& span) {
        ValueId v = b_.new_value(span);
        b_.emit(Const{v, std::move(lit)}, span);
        return v;
    }

    ValueId invoke_static(const std::string& target, const SourceSpan& span) {
        ValueId v = b_.new_value(span);
        b_.emit(Invoke{v, StaticTarget{target}, {}, {}, b_.next_site()}, span);
        return v;
    }

    ValueId get_field(ValueId obj, const std::string& field, const SourceSpan& span) {
        ValueId v = b_.new_value(span);
        b_.emit(GetField{v, obj, field}, span);
        return v;
    }

    void bind(const std::string& name, ValueId value, const SourceSpan& span) {
        const ValueInfo& info = b_.function().info(value);
        if (info.name.empty() && !info.is_param) {
            b_.set_name(value, name);
        } else {
            ValueId copy = b_.new_value(span, name);
            b_.emit(Assign{copy, value}, span);
            value = copy;
        }
        env_[name] = value;
        if (module_scope_) b_.emit(LexicalWrite{name, value}, span);
    }

    // ---- statements -------------------------------------------------------

    void statement(const AstNode& s) {
        switch (s.kind) {
            case AstKind::Assign: {
                ValueId value = expr(*s.children.back());
                for (size_t i = 0; i + 1 < s.children.size(); ++i) assign_to(*s.children[i], value, s.span);
                return;
            }
            case AstKind::AugAssign: {
                ValueId current = expr(*s.children[0]);
                ValueId rhs = expr(*s.children[1]);
                ValueId result = b_.new_value(s.span);
                b_.emit(BinOp{result, s.text, current, rhs}, s.span);
                assign_to(*s.children[0], result, s.span);
                return;
            }
            case AstKind::ExprStmt:
                expr(*s.children[0]);
                return;
            case AstKind::Pass:
                return;
            case AstKind::Return: {
                ValueId v = s.children.empty() ? constant(NoneLiteral{}, s.span) : expr(*s.children[0]);
                b_.emit(Return{v}, s.span);
                b_.set_block(b_.new_block());
                dead_ = true;
                return;
            }
            case AstKind::If:
                if_statement(s);
                return;
            case AstKind::While:
                while_statement(s);
                return;
            case AstKind::With: {
                ValueId ctx_value = expr(*s.children[0]);
                if (s.children.size() > 1) assign_to(*s.children[1], ctx_value, s.children[1]->span);
                lower_body(s.body);
                return;
            }
            case AstKind::Import:
                for (const auto& a : s.children) {
                    auto parts = split_dotted(a->text);
                    ValueId v = invoke_static("model:" + parts[0] + ".import", a->span);
                    if (a->alias.empty()) {
                        bind(parts[0], v, a->span);
                    } else {
                        for (size_t i = 1; i < parts.size(); ++i) v = get_field(v, parts[i], a->span);
                        bind(a->alias, v, a->span);
                    }
                }
                return;
            case AstKind::ImportFrom: {
                auto parts = split_dotted(s.text);
                ValueId mod = invoke_static("model:" + parts[0] + ".import", s.span);
                for (size_t i = 1; i < parts.size(); ++i) mod = get_field(mod, parts[i], s.span);
                for (const auto& a : s.children) {
                    ValueId v = get_field(mod, a->text, a->span);
                    bind(a->alias.empty() ? a->text : a->alias, v, a->span);
                }
                return;
            }
            case AstKind::FunctionDef:
                if (!module_scope_) unsupported(s, "nested function definition");
                bind(s.text, function_def(s, ctx_.module + "." + s.text, FunctionKind::Function, ""), s.span);
                return;
            case AstKind::ClassDef:
                if (!module_scope_) unsupported(s, "nested class definition");
                class_def(s);
                return;
            default:
                throw LoweringError(s.span, std::string("unexpected statement ") + to_string(s.kind));
        }
    }

    void assign_to(const AstNode& target, ValueId value, const SourceSpan& span) {
        switch (target.kind) {
            case AstKind::Name:
                bind(target.text, value, span);
                return;
            case AstKind::Attribute: {
                ValueId obj = expr(*target.children[0]);
                b_.emit(PutField{obj, target.text, value}, span);
                return;
            }
            case AstKind::Subscript: {
                ValueId obj = expr(*target.children[0]);
                b_.emit(PutField{obj, subscript_field(*target.children[1]), value}, span);
                return;
            }
            case AstKind::TupleLit:
            case AstKind::ListLit:
                for (const auto& elt : target.children) {
                    if (elt->kind == AstKind::TupleLit || elt->kind == AstKind::ListLit) {
                        unsupported(*elt, "nested unpacking target");
                    }
                    assign_to(*elt, get_field(value, kSummaryField, elt->span), span);
                }
                return;
            default:
                throw LoweringError(target.span, "invalid assignment target");
        }
    }

    std::string subscript_field(const AstNode& key) {
        if (key.kind == AstKind::Constant) {
            if (const auto* s = std::get_if<std::string>(&key.literal)) return *s;
        }
        expr(key);
        return kSummaryField;
    }

    struct Arm {
        BlockId end;
        Env env;
    };

    void if_statement(const AstNode& s) {
        ValueId cond = expr(*s.children[0]);
        BlockId entry = b_.current_block();
        BlockId then_b = b_.new_block();
        BlockId else_b = b_.new_block();
        b_.emit(Branch{cond, then_b, else_b}, s.span);
        b_.add_pred(then_b, entry);
        b_.add_pred(else_b, entry);
        const Env saved = env_;
        const bool was_dead = dead_;

        std::vector<Arm> live;
        for (int arm = 0; arm < 2; ++arm) {
            env_ = saved;
            dead_ = was_dead;
            b_.set_block(arm == 0 ? then_b : else_b);
            lower_body(arm == 0 ? s.body : s.orelse);
            if (!dead_) live.push_back(Arm{b_.current_block(), env_});
        }

        BlockId merge = b_.new_block();
        if (live.empty()) {
            b_.set_block(merge);
            env_ = saved;
            dead_ = true;
            return;
        }
        dead_ = false;
        Env merged;
        std::vector<std::pair<std::string, std::vector<ValueId>>> phis;
        if (live.size() == 1) {
            merged = live[0].env;
        } else {
            std::set<std::string> names;
            for (const auto& a : live) {
                for (const auto& [n, _] : a.env) names.insert(n);
            }
            for (const auto& name : names) {
                std::vector<ValueId> uses;
                bool missing = false;
                for (auto& a : live) {
                    auto it = a.env.find(name);
                    if (it == a.env.end()) {
                        missing = true;
                        if (module_scope_) break;
                        b_.set_block(a.end);
                        uses.push_back(constant(NoneLiteral{}, s.span));
                    } else {
                        uses.push_back(it->second);
                    }
                }
                if (missing && module_scope_) continue;
                bool same = std::all_of(uses.begin(), uses.end(), [&](ValueId v) { return v == uses[0]; });
                if (same) {
                    merged[name] = uses[0];
                } else {
                    phis.emplace_back(name, std::move(uses));
                }
            }
        }
        for (const auto& a : live) {
            b_.set_block(a.end);
            b_.emit(Goto{merge}, s.span);
            b_.add_pred(merge, a.end);
        }
        b_.set_block(merge);
        for (auto& [name, uses] : phis) {
            ValueId p = b_.new_value(s.span, name);
            b_.emit_phi(merge, Phi{p, uses}, s.span);
            merged[name] = p;
        }
        env_ = std::move(merged);
    }

    void while_statement(const AstNode& s) {
        std::set<std::string> assigned;
        collect_assigned(s.body, assigned);
        std::vector<std::pair<std::string, ValueId>> carried;  // name -> phi value
        std::vector<ValueId> entry_values;
        for (const auto& name : assigned) {
            auto it = env_.find(name);
            if (it == env_.end()) {
                if (module_scope_) continue;
                env_[name] = constant(NoneLiteral{}, s.span);
                it = env_.find(name);
            }
            entry_values.push_back(it->second);
            carried.emplace_back(name, ValueId{});
        }

        BlockId pre = b_.current_block();
        BlockId header = b_.new_block();
        b_.emit(Goto{header}, s.span);
        b_.add_pred(header, pre);
        b_.set_block(header);
        for (auto& [name, p] : carried) {
            p = b_.new_value(s.span, name);
            env_[name] = p;
        }
        const Env header_env = env_;
        ValueId cond = expr(*s.children[0]);
        BlockId cond_end = b_.current_block();
        BlockId body = b_.new_block();
        BlockId exit = b_.new_block();
        b_.emit(Branch{cond, body, exit}, s.span);
        b_.add_pred(body, cond_end);
        b_.add_pred(exit, cond_end);

        const bool was_dead = dead_;
        b_.set_block(body);
        lower_body(s.body);
        bool back_live = !dead_;
        if (back_live) {
            BlockId back = b_.current_block();
            b_.emit(Goto{header}, s.span);
            b_.add_pred(header, back);
        }
        for (size_t i = 0; i < carried.size(); ++i) {
            std::vector<ValueId> uses{entry_values[i]};
            if (back_live) uses.push_back(env_.at(carried[i].first));
            b_.emit_phi(header, Phi{carried[i].second, uses}, s.span);
        }
        env_ = header_env;
        dead_ = was_dead;
        b_.set_block(exit);
        lower_body(s.orelse);
    }

    ValueId function_def(const AstNode& def, const std::string& qualified, FunctionKind kind,
                         const std::string& declared_class) {
        for (const auto& p : def.children) {
            if (!p->children.empty()) expr(*p->children[0]);
        }
        FunctionLowerer inner(ctx_, qualified, kind, def.span, false);
        inner.builder().function().declared_class = declared_class;
        inner.builder().add_param("", def.span);
        std::set<std::string> locals;
        for (const auto& p : def.children) {
            ValueId v = inner.builder().add_param(p->text, p->span, !p->children.empty());
            inner.bind_param(p->text, v);
            locals.insert(p->text);
        }
        collect_assigned(def.body, locals);
        inner.set_locals(std::move(locals));
        inner.lower_body(def.body);
        ctx_.functions.push_back(inner.finish(def.span));

        ValueId f = b_.new_value(def.span);
        b_.emit(New{f, "function:" + qualified, b_.next_site(), std::nullopt}, def.span);
        return f;
    }

    void class_def(const AstNode& s) {
        if (s.children.size() > 1) unsupported(*s.children[1], "multiple inheritance");
        const std::string qualified = ctx_.module + "." + s.text;
        std::vector<MethodBinding> methods;
        for (const auto& base : s.children) {
            expr(*base);
            if (base->kind == AstKind::Name) {
                auto it = ctx_.class_methods.find(base->text);
                if (it != ctx_.class_methods.end()) methods = it->second;
            }
        }
        ValueId cls = b_.new_value(s.span);
        b_.emit(New{cls, "class:" + qualified, b_.next_site(), std::nullopt}, s.span);
        for (const auto& member : s.body) {
            switch (member->kind) {
                case AstKind::FunctionDef: {
                    const std::string mq = qualified + "." + member->text;
                    FunctionKind kind = member->children.empty() ? FunctionKind::Function : FunctionKind::Method;
                    ValueId f = function_def(*member, mq, kind, qualified);
                    b_.set_name(f, member->text);
                    b_.emit(PutField{cls, member->text, f}, member->span);
                    auto it = std::find_if(methods.begin(), methods.end(),
                                           [&](const MethodBinding& m) { return m.field == member->text; });
                    if (it != methods.end()) {
                        it->target = mq;
                    } else {
                        methods.push_back(MethodBinding{member->text, mq});
                    }
                    break;
                }
                case AstKind::Assign: {
                    ValueId value = expr(*member->children.back());
                    for (size_t i = 0; i + 1 < member->children.size(); ++i) {
                        const AstNode& t = *member->children[i];
                        if (t.kind != AstKind::Name) unsupported(t, "class attribute target");
                        b_.emit(PutField{cls, t.text, value}, member->span);
                    }
                    break;
                }
                case AstKind::Pass:
                    break;
                default:
                    unsupported(*member, std::string("class body statement ") + to_string(member->kind));
            }
        }
        ctx_.class_methods[s.text] = methods;
        ctx_.functions.push_back(synthesize_class_model(qualified, ctx_.module, methods, s.span));
        bind(s.text, cls, s.span);
    }

    // ---- expressions ------------------------------------------------------

    ValueId read_name(const AstNode& n) {
        auto it = env_.find(n.text);
        if (it != env_.end()) return it->second;
        if (!module_scope_ && locals_.count(n.text)) return constant(NoneLiteral{}, n.span);
        ValueId v = b_.new_value(n.span);
        b_.emit(LexicalRead{v, n.text}, n.span);
        return v;
    }

    ValueId expr(const AstNode& e) {
        switch (e.kind) {
            case AstKind::Name:
                return read_name(e);
            case AstKind::Constant:
                return constant(e.literal, e.span);
            case AstKind::Attribute:
                return get_field(expr(*e.children[0]), e.text, e.span);
            case AstKind::Subscript: {
                ValueId obj = expr(*e.children[0]);
                return get_field(obj, subscript_field(*e.children[1]), e.span);
            }
            case AstKind::Call: {
                ValueId callee = expr(*e.children[0]);
                std::vector<ValueId> args;
                std::vector<KeywordArg> keywords;
                for (size_t i = 1; i < e.children.size(); ++i) {
                    const AstNode& a = *e.children[i];
                    if (a.kind == AstKind::Keyword) {
                        keywords.push_back(KeywordArg{a.text, expr(*a.children[0])});
                    } else {
                        args.push_back(expr(a));
                    }
                }
                ValueId v = b_.new_value(e.span);
                b_.emit(Invoke{v, callee, std::move(args), std::move(keywords), b_.next_site()}, e.span);
                return v;
            }
            case AstKind::ListLit:
            case AstKind::TupleLit: {
                std::optional<ShapeLiteral> shape;
                if (e.kind == AstKind::ListLit) {
                    ShapeLiteral entries;
                    bool ok = true;
                    for (const auto& c : e.children) {
                        std::optional<std::int64_t> x;
                        if (!shape_element(*c, x)) {
                            ok = false;
                            break;
                        }
                        entries.push_back(x);
                    }
                    if (ok) shape = std::move(entries);
                }
                std::vector<ValueId> elements;
                for (const auto& c : e.children) elements.push_back(expr(*c));
                ValueId v = b_.new_value(e.span);
                b_.emit(New{v, e.kind == AstKind::ListLit ? "list" : "tuple", b_.next_site(), std::move(shape)}, e.span);
                for (ValueId x : elements) b_.emit(PutField{v, kSummaryField, x}, e.span);
                return v;
            }
            case AstKind::DictLit: {
                std::vector<std::pair<std::string, ValueId>> entries;
                for (size_t i = 0; i + 1 < e.children.size(); i += 2) {
                    std::string field = subscript_field(*e.children[i]);
                    entries.emplace_back(field, expr(*e.children[i + 1]));
                }
                ValueId v = b_.new_value(e.span);
                b_.emit(New{v, "dict", b_.next_site(), std::nullopt}, e.span);
                for (const auto& [field, x] : entries) b_.emit(PutField{v, field, x}, e.span);
                return v;
            }
            case AstKind::BinOp: {
                ValueId lhs = expr(*e.children[0]);
                ValueId rhs = expr(*e.children[1]);
                ValueId v = b_.new_value(e.span);
                b_.emit(BinOp{v, e.text, lhs, rhs}, e.span);
                return v;
            }
            case AstKind::UnaryOp: {
                ValueId operand = expr(*e.children[0]);
                ValueId v = b_.new_value(e.span);
                b_.emit(UnaryOp{v, e.text, operand}, e.span);
                return v;
            }
            case AstKind::Compare: {
                std::vector<ValueId> operands;
                for (const auto& c : e.children) operands.push_back(expr(*c));
                std::optional<ValueId> result;
                for (size_t i = 0; i < e.ops.size() && i + 1 < operands.size(); ++i) {
                    ValueId step = b_.new_value(e.span);
                    b_.emit(BinOp{step, e.ops[i], operands[i], operands[i + 1]}, e.span);
                    if (result) {
                        ValueId both = b_.new_value(e.span);
                        b_.emit(BinOp{both, "and", *result, step}, e.span);
                        step = both;
                    }
                    result = step;
                }
                if (!result) throw LoweringError(e.span, "comparison without operator");
                return *result;
            }
            default:
                throw LoweringError(e.span, std::string("unexpected expression ") + to_string(e.kind));
        }
    }
};

}  // namespace

std::vector<IRFunction> lower_module(const AstNode& module, const std::string& module_name) {
    if (module.kind != AstKind::Module) throw LoweringError(module.span, "expected a module");
    ModuleContext ctx{module_name, {}, {}};
    FunctionLowerer init(ctx, module_init_name(module_name), FunctionKind::ModuleInit, module.span, true);
    init.builder().add_param("", module.span);
    init.lower_body(module.body);
    IRFunction init_fn = init.finish(module.span);
    std::vector<IRFunction> out;
    out.reserve(ctx.functions.size() + 1);
    out.push_back(std::move(init_fn));
    for (auto& f : ctx.functions) out.push_back(std::move(f));
    return out;
}

}  // namespace tensorlint
