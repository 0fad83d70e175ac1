#include "tensorlint/ir.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace tensorlint::ir {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string v(ValueId id) { return "v" + std::to_string(id.id); }
std::string b(BlockId id) { return "bb" + std::to_string(id.id); }

std::string escape(const std::string& s) {
    std::string out = "\"";
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    static const char* hex = "0123456789abcdef";
                    out += "\\x";
                    out += hex[c >> 4];
                    out += hex[c & 0xf];
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out + "\"";
}

}  // namespace

std::optional<ValueId> defined_value(const Instruction& inst) {
    return std::visit(Overloaded{
                          [](const PutField&) -> std::optional<ValueId> { return std::nullopt; },
                          [](const LexicalWrite&) -> std::optional<ValueId> { return std::nullopt; },
                          [](const Return&) -> std::optional<ValueId> { return std::nullopt; },
                          [](const Branch&) -> std::optional<ValueId> { return std::nullopt; },
                          [](const Goto&) -> std::optional<ValueId> { return std::nullopt; },
                          [](const auto& op) -> std::optional<ValueId> { return op.def; },
                      },
                      inst.op);
}

std::vector<ValueId> used_values(const Instruction& inst) {
    return std::visit(Overloaded{
                          [](const Const&) { return std::vector<ValueId>{}; },
                          [](const Assign& a) { return std::vector<ValueId>{a.use}; },
                          [](const Phi& p) { return p.uses; },
                          [](const BinOp& op) { return std::vector<ValueId>{op.lhs, op.rhs}; },
                          [](const UnaryOp& op) { return std::vector<ValueId>{op.operand}; },
                          [](const New&) { return std::vector<ValueId>{}; },
                          [](const GetField& g) { return std::vector<ValueId>{g.object}; },
                          [](const PutField& p) { return std::vector<ValueId>{p.object, p.value}; },
                          [](const Invoke& call) {
                              std::vector<ValueId> out;
                              if (const auto* c = std::get_if<ValueId>(&call.callee)) out.push_back(*c);
                              out.insert(out.end(), call.args.begin(), call.args.end());
                              for (const auto& k : call.keywords) out.push_back(k.value);
                              return out;
                          },
                          [](const LexicalRead&) { return std::vector<ValueId>{}; },
                          [](const LexicalWrite& w) { return std::vector<ValueId>{w.value}; },
                          [](const Return& r) { return std::vector<ValueId>{r.value}; },
                          [](const Branch& br) { return std::vector<ValueId>{br.condition}; },
                          [](const Goto&) { return std::vector<ValueId>{}; },
                      },
                      inst.op);
}

void IRFunction::for_each_instruction(const std::function<void(const BasicBlock&, const Instruction&)>& fn) const {
    for (const auto& block : blocks) {
        for (const auto& inst : block.instructions) fn(block, inst);
    }
}

// ---------------------------------------------------------------------------
// FunctionBuilder

FunctionBuilder::FunctionBuilder(std::string name, FunctionKind kind, std::string module, SourceSpan span) {
    fn_.name = std::move(name);
    fn_.kind = kind;
    fn_.module = std::move(module);
    fn_.span = std::move(span);
    fn_.blocks.push_back(BasicBlock{BlockId{0}, {}, {}});
}

ValueId FunctionBuilder::new_value(const SourceSpan& span, std::string name) {
    ValueId id{static_cast<int>(fn_.values.size())};
    fn_.values.push_back(ValueInfo{std::move(name), span, false});
    return id;
}

ValueId FunctionBuilder::add_param(const std::string& name, const SourceSpan& span, bool has_default) {
    ValueId id = new_value(span, name);
    fn_.values.back().is_param = true;
    fn_.params.push_back(Param{id, name, has_default});
    return id;
}

BlockId FunctionBuilder::new_block() {
    BlockId id{static_cast<int>(fn_.blocks.size())};
    fn_.blocks.push_back(BasicBlock{id, {}, {}});
    return id;
}

void FunctionBuilder::set_block(BlockId block) { current_ = block; }

bool FunctionBuilder::terminated() const {
    const auto& insts = fn_.blocks[static_cast<size_t>(current_.id)].instructions;
    return !insts.empty() && insts.back().is_terminator();
}

void FunctionBuilder::add_pred(BlockId block, BlockId pred) {
    fn_.blocks[static_cast<size_t>(block.id)].preds.push_back(pred);
}

void FunctionBuilder::emit(InstructionKind op, const SourceSpan& span) {
    fn_.blocks[static_cast<size_t>(current_.id)].instructions.push_back(Instruction{std::move(op), span});
}

void FunctionBuilder::emit_before_terminator(BlockId block, InstructionKind op, const SourceSpan& span) {
    auto& insts = fn_.blocks[static_cast<size_t>(block.id)].instructions;
    auto pos = insts.end();
    if (!insts.empty() && insts.back().is_terminator()) pos = insts.end() - 1;
    insts.insert(pos, Instruction{std::move(op), span});
}

void FunctionBuilder::emit_phi(BlockId block, Phi phi, const SourceSpan& span) {
    auto& insts = fn_.blocks[static_cast<size_t>(block.id)].instructions;
    auto pos = std::find_if(insts.begin(), insts.end(), [](const Instruction& i) { return !i.as<Phi>(); });
    insts.insert(pos, Instruction{std::move(phi), span});
}

Phi& FunctionBuilder::phi_at(BlockId block, ValueId def) {
    for (auto& inst : fn_.blocks[static_cast<size_t>(block.id)].instructions) {
        if (auto* p = std::get_if<Phi>(&inst.op); p && p->def == def) return *p;
    }
    throw std::logic_error("no phi for " + v(def));
}

void FunctionBuilder::set_name(ValueId value, const std::string& name) {
    fn_.values[static_cast<size_t>(value.id)].name = name;
}

// ---------------------------------------------------------------------------
// validate

namespace {

std::vector<BlockId> successors(const BasicBlock& block) {
    if (block.instructions.empty()) return {};
    const Instruction& last = block.instructions.back();
    if (const auto* br = last.as<Branch>()) return {br->if_true, br->if_false};
    if (const auto* g = last.as<Goto>()) return {g->target};
    return {};
}

struct DefSite {
    int block = -1;  // -1 for parameters
    size_t index = 0;
    SourceSpan span;
};

}  // namespace

std::vector<Violation> validate(const IRFunction& fn) {
    std::vector<Violation> out;
    auto report = [&](std::string message, const SourceSpan& span) {
        out.push_back(Violation{fn.name + ": " + std::move(message), span});
    };
    const size_t nblocks = fn.blocks.size();
    const size_t nvalues = fn.values.size();
    auto in_range = [&](ValueId id) { return id.id >= 0 && static_cast<size_t>(id.id) < nvalues; };

    if ((fn.kind == FunctionKind::Method) && fn.params.size() < 2) {
        report("method has no self parameter", fn.span);
    }
    if (nblocks == 0) {
        report("function has no blocks", fn.span);
        return out;
    }

    // Definitions.
    std::vector<std::vector<DefSite>> defs(nvalues);
    for (const auto& p : fn.params) {
        if (!in_range(p.value)) {
            report("parameter " + v(p.value) + " out of range", fn.span);
            continue;
        }
        defs[static_cast<size_t>(p.value.id)].push_back(DefSite{-1, 0, fn.span});
    }
    std::set<SiteId> sites;
    for (size_t bi = 0; bi < nblocks; ++bi) {
        const BasicBlock& block = fn.blocks[bi];
        if (block.id.id != static_cast<int>(bi)) report(b(block.id) + " stored at index " + std::to_string(bi), fn.span);
        if (block.instructions.empty() || !block.instructions.back().is_terminator()) {
            report(b(block.id) + " does not end with a terminator", fn.span);
        }
        bool phis_done = false;
        for (size_t ii = 0; ii < block.instructions.size(); ++ii) {
            const Instruction& inst = block.instructions[ii];
            if (inst.is_terminator() && ii + 1 != block.instructions.size()) {
                report("terminator in the middle of " + b(block.id), inst.span);
            }
            if (inst.as<Phi>()) {
                if (phis_done) report("phi after non-phi instruction in " + b(block.id), inst.span);
                if (inst.as<Phi>()->uses.size() != block.preds.size()) {
                    report("phi " + v(inst.as<Phi>()->def) + " has " + std::to_string(inst.as<Phi>()->uses.size()) +
                               " operands for " + std::to_string(block.preds.size()) + " predecessors",
                           inst.span);
                }
            } else {
                phis_done = true;
            }
            if (auto d = defined_value(inst)) {
                if (!in_range(*d)) {
                    report("definition of out-of-range value " + v(*d), inst.span);
                } else {
                    defs[static_cast<size_t>(d->id)].push_back(DefSite{static_cast<int>(bi), ii, inst.span});
                }
            }
            SiteId site = -1;
            if (const auto* n = inst.as<New>()) site = n->site;
            if (const auto* c = inst.as<Invoke>()) site = c->site;
            if (site >= 0 && !sites.insert(site).second) report("duplicate site id " + std::to_string(site), inst.span);
            for (BlockId t : successors(block)) {
                if (t.id < 0 || static_cast<size_t>(t.id) >= nblocks) report("branch to missing block " + b(t), inst.span);
            }
        }
    }
    for (size_t i = 0; i < nvalues; ++i) {
        if (defs[i].empty()) {
            report("value " + v(ValueId{static_cast<int>(i)}) + " is never defined", fn.values[i].span);
        } else if (defs[i].size() > 1) {
            report("value " + v(ValueId{static_cast<int>(i)}) + " is defined " + std::to_string(defs[i].size()) +
                       " times",
                   defs[i][1].span);
        }
    }

    // Predecessor lists must match the edges.
    std::vector<std::multiset<int>> actual_preds(nblocks);
    for (size_t bi = 0; bi < nblocks; ++bi) {
        for (BlockId s : successors(fn.blocks[bi])) {
            if (s.id >= 0 && static_cast<size_t>(s.id) < nblocks) actual_preds[static_cast<size_t>(s.id)].insert(static_cast<int>(bi));
        }
    }
    for (size_t bi = 0; bi < nblocks; ++bi) {
        std::multiset<int> declared;
        for (BlockId p : fn.blocks[bi].preds) declared.insert(p.id);
        if (declared != actual_preds[bi]) report("predecessor list of " + b(BlockId{static_cast<int>(bi)}) + " does not match its edges", fn.span);
    }

    // Dominators over blocks reachable from the entry.
    std::vector<bool> reachable(nblocks, false);
    std::vector<int> order;
    {
        std::vector<int> stack{0};
        reachable[0] = true;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            order.push_back(cur);
            for (BlockId s : successors(fn.blocks[static_cast<size_t>(cur)])) {
                if (s.id >= 0 && static_cast<size_t>(s.id) < nblocks && !reachable[static_cast<size_t>(s.id)]) {
                    reachable[static_cast<size_t>(s.id)] = true;
                    stack.push_back(s.id);
                }
            }
        }
    }
    std::vector<std::set<int>> dom(nblocks);
    std::set<int> all;
    for (size_t i = 0; i < nblocks; ++i) {
        if (reachable[i]) all.insert(static_cast<int>(i));
    }
    for (size_t i = 0; i < nblocks; ++i) dom[i] = all;
    dom[0] = {0};
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t i = 1; i < nblocks; ++i) {
            if (!reachable[i]) continue;
            std::set<int> next = all;
            bool any = false;
            for (BlockId p : fn.blocks[i].preds) {
                if (p.id < 0 || static_cast<size_t>(p.id) >= nblocks || !reachable[static_cast<size_t>(p.id)]) continue;
                std::set<int> meet;
                std::set_intersection(next.begin(), next.end(), dom[static_cast<size_t>(p.id)].begin(),
                                      dom[static_cast<size_t>(p.id)].end(), std::inserter(meet, meet.begin()));
                next = std::move(meet);
                any = true;
            }
            if (!any) next.clear();
            next.insert(static_cast<int>(i));
            if (next != dom[i]) {
                dom[i] = std::move(next);
                changed = true;
            }
        }
    }
    auto dominates = [&](const DefSite& def, int block, size_t index) {
        if (def.block == -1) return true;
        if (def.block == block) return def.index < index;
        return dom[static_cast<size_t>(block)].count(def.block) > 0;
    };

    for (size_t bi = 0; bi < nblocks; ++bi) {
        if (!reachable[bi]) continue;
        const BasicBlock& block = fn.blocks[bi];
        for (size_t ii = 0; ii < block.instructions.size(); ++ii) {
            const Instruction& inst = block.instructions[ii];
            if (const auto* phi = inst.as<Phi>()) {
                for (size_t k = 0; k < phi->uses.size() && k < block.preds.size(); ++k) {
                    ValueId use = phi->uses[k];
                    if (!in_range(use) || defs[static_cast<size_t>(use.id)].empty()) {
                        report("use of undefined value " + v(use), inst.span);
                        continue;
                    }
                    int pred = block.preds[k].id;
                    if (pred < 0 || static_cast<size_t>(pred) >= nblocks || !reachable[static_cast<size_t>(pred)]) continue;
                    const DefSite& d = defs[static_cast<size_t>(use.id)].front();
                    size_t end = fn.blocks[static_cast<size_t>(pred)].instructions.size();
                    if (!dominates(d, pred, end)) report("phi operand " + v(use) + " does not dominate its edge", inst.span);
                }
                continue;
            }
            for (ValueId use : used_values(inst)) {
                if (!in_range(use) || defs[static_cast<size_t>(use.id)].empty()) {
                    report("use of undefined value " + v(use), inst.span);
                    continue;
                }
                const DefSite& d = defs[static_cast<size_t>(use.id)].front();
                if (!dominates(d, static_cast<int>(bi), ii)) report("use of " + v(use) + " is not dominated by its definition", inst.span);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// printing

std::string to_string(const Literal& lit) {
    return std::visit(Overloaded{
                          [](NoneLiteral) -> std::string { return "None"; },
                          [](bool x) -> std::string { return x ? "True" : "False"; },
                          [](std::int64_t i) { return std::to_string(i); },
                          [](double d) {
                              char buf[64];
                              auto res = std::to_chars(buf, buf + sizeof buf, d);
                              std::string s(buf, res.ptr);
                              if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
                              return s;
                          },
                          [](const std::string& s) { return escape(s); },
                      },
                      lit);
}

namespace {

std::string shape_text(const ShapeLiteral& shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += shape[i] ? std::to_string(*shape[i]) : "None";
    }
    return s + "]";
}

std::string list(const std::vector<ValueId>& ids) {
    std::string s;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ", ";
        s += v(ids[i]);
    }
    return s;
}

}  // namespace

std::string to_string(const Instruction& inst) {
    return std::visit(
        Overloaded{
            [](const Const& c) { return v(c.def) + " = const " + to_string(c.value); },
            [](const Assign& a) { return v(a.def) + " = copy " + v(a.use); },
            [](const Phi& p) { return v(p.def) + " = phi " + list(p.uses); },
            [](const BinOp& op) { return v(op.def) + " = binop " + op.op + " " + v(op.lhs) + ", " + v(op.rhs); },
            [](const UnaryOp& op) { return v(op.def) + " = unop " + op.op + " " + v(op.operand); },
            [](const New& n) {
                std::string s = v(n.def) + " = new " + n.class_token;
                if (n.shape) s += " " + shape_text(*n.shape);
                return s + " @" + std::to_string(n.site);
            },
            [](const GetField& g) { return v(g.def) + " = getfield " + v(g.object) + " ." + g.field; },
            [](const PutField& p) { return "putfield " + v(p.object) + " ." + p.field + " " + v(p.value); },
            [](const Invoke& call) {
                std::string s = v(call.def) + " = ";
                if (const auto* st = std::get_if<StaticTarget>(&call.callee)) {
                    s += "invoke-static " + st->name + "(";
                } else {
                    s += "invoke " + v(std::get<ValueId>(call.callee)) + "(";
                }
                s += list(call.args);
                for (size_t i = 0; i < call.keywords.size(); ++i) {
                    if (i || !call.args.empty()) s += ", ";
                    s += call.keywords[i].name + "=" + v(call.keywords[i].value);
                }
                return s + ") @" + std::to_string(call.site);
            },
            [](const LexicalRead& r) { return v(r.def) + " = lexread " + r.name; },
            [](const LexicalWrite& w) { return "lexwrite " + w.name + " " + v(w.value); },
            [](const Return& r) { return "return " + v(r.value); },
            [](const Branch& br) { return "branch " + v(br.condition) + " " + b(br.if_true) + " " + b(br.if_false); },
            [](const Goto& g) { return "goto " + b(g.target); },
        },
        inst.op);
}

std::string pretty_print(const IRFunction& fn) {
    static const char* kinds[] = {"module", "function", "method", "constructor", "model"};
    std::ostringstream out;
    out << kinds[static_cast<int>(fn.kind)] << " " << fn.name << "(";
    for (size_t i = 0; i < fn.params.size(); ++i) {
        if (i) out << ", ";
        out << v(fn.params[i].value);
        if (!fn.params[i].name.empty()) out << " " << fn.params[i].name;
        if (fn.params[i].has_default) out << "=?";
    }
    if (fn.accepts_varargs) out << (fn.params.empty() ? "" : ", ") << "*";
    if (fn.accepts_kwargs) out << (fn.params.empty() && !fn.accepts_varargs ? "" : ", ") << "**";
    out << ")";
    if (!fn.declared_class.empty()) out << " class " << fn.declared_class;
    out << "\n";
    for (const auto& block : fn.blocks) {
        out << b(block.id) << ":";
        if (!block.preds.empty()) {
            out << "  ; preds ";
            for (size_t i = 0; i < block.preds.size(); ++i) out << (i ? ", " : "") << b(block.preds[i]);
        }
        out << "\n";
        for (const auto& inst : block.instructions) out << "  " << to_string(inst) << "\n";
    }
    return out.str();
}

}  // namespace tensorlint::ir
