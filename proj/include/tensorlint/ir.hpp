// Three-address SSA intermediate representation.
//
// Every analyzed function, whether lowered from source or synthesized from a
// library model, is an IRFunction: a list of basic blocks holding
// instructions over function-scoped SSA values. Values are defined exactly
// once; joins use explicit Phi instructions at block starts whose operands
// line up with the block's predecessor list.
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tensorlint/ast.hpp"
#include "tensorlint/source_span.hpp"

namespace tensorlint::ir {

struct ValueId {
    int id = -1;

    bool valid() const { return id >= 0; }
    auto operator<=>(const ValueId&) const = default;
};

struct BlockId {
    int id = -1;
    auto operator<=>(const BlockId&) const = default;
};

using SiteId = int;

/// Reserved field name for subscripts with a non-constant key.
inline constexpr const char* kSummaryField = "*";

/// Integer entries of a list literal whose elements are all int constants or
/// None; std::nullopt marks None.
using ShapeLiteral = std::vector<std::optional<std::int64_t>>;

struct Const {
    ValueId def;
    Literal value;
};
struct Assign {
    ValueId def;
    ValueId use;
};
struct Phi {
    ValueId def;
    std::vector<ValueId> uses;  // one per predecessor, same order
};
struct BinOp {
    ValueId def;
    std::string op;
    ValueId lhs;
    ValueId rhs;
};
struct UnaryOp {
    ValueId def;
    std::string op;
    ValueId operand;
};
/// Allocation. `class_token` names what is created:
///   "list", "dict", "tuple", "object" or a model class name  -> heap object
///   "function:<qualified name>"                              -> function object
///   "class:<qualified name>"                                 -> class object
///   "trampoline:<qualified method name>"                     -> bound method
///   "instance:<qualified class name>"                        -> class instance
struct New {
    ValueId def;
    std::string class_token;
    SiteId site = 0;
    std::optional<ShapeLiteral> shape;
};
struct GetField {
    ValueId def;
    ValueId object;
    std::string field;
};
struct PutField {
    ValueId object;
    std::string field;
    ValueId value;
};
struct KeywordArg {
    std::string name;
    ValueId value;
};
/// Static callee, e.g. "model:tensorflow.import".
struct StaticTarget {
    std::string name;
};
struct Invoke {
    ValueId def;
    std::variant<ValueId, StaticTarget> callee;
    std::vector<ValueId> args;
    std::vector<KeywordArg> keywords;
    SiteId site = 0;
};
/// Read of a module-level name from inside a function body.
struct LexicalRead {
    ValueId def;
    std::string name;
};
/// Module-level binding of a name that function bodies read.
struct LexicalWrite {
    std::string name;
    ValueId value;
};
struct Return {
    ValueId value;
};
struct Branch {
    ValueId condition;
    BlockId if_true;
    BlockId if_false;
};
struct Goto {
    BlockId target;
};

using InstructionKind = std::variant<Const, Assign, Phi, BinOp, UnaryOp, New, GetField, PutField, Invoke,
                                     LexicalRead, LexicalWrite, Return, Branch, Goto>;

struct Instruction {
    InstructionKind op;
    SourceSpan span;

    template <typename T>
    const T* as() const {
        return std::get_if<T>(&op);
    }
    bool is_terminator() const {
        return std::holds_alternative<Return>(op) || std::holds_alternative<Branch>(op) ||
               std::holds_alternative<Goto>(op);
    }
};

/// Value defined by `inst`, if any.
std::optional<ValueId> defined_value(const Instruction& inst);

/// Values read by `inst`, in operand order.
std::vector<ValueId> used_values(const Instruction& inst);

struct BasicBlock {
    BlockId id;
    std::vector<BlockId> preds;
    std::vector<Instruction> instructions;
};

struct ValueInfo {
    std::string name;  // source variable bound to this value, may be empty
    SourceSpan span;
    bool is_param = false;
};

struct Param {
    ValueId value;
    std::string name;
    bool has_default = false;
};

enum class FunctionKind { ModuleInit, Function, Method, Constructor, Model };

struct IRFunction {
    std::string name;           // qualified, e.g. "figure1.conv_net"
    FunctionKind kind = FunctionKind::Function;
    std::string module;         // owning source module or model package
    std::string declared_class; // for methods and constructors
    SourceSpan span;
    /// params[0] is the callee slot: the function or callable object being
    /// invoked. Declared parameters follow.
    std::vector<Param> params;
    bool accepts_varargs = false;
    bool accepts_kwargs = false;
    std::vector<ValueInfo> values;
    std::vector<BasicBlock> blocks;

    const ValueInfo& info(ValueId v) const { return values.at(static_cast<size_t>(v.id)); }
    size_t value_count() const { return values.size(); }

    /// Visit every instruction in block order.
    void for_each_instruction(const std::function<void(const BasicBlock&, const Instruction&)>& fn) const;
};

using FunctionPtr = std::shared_ptr<const IRFunction>;

/// Incremental construction of an IRFunction.
class FunctionBuilder {
public:
    FunctionBuilder(std::string name, FunctionKind kind, std::string module, SourceSpan span);

    ValueId new_value(const SourceSpan& span, std::string name = {});
    ValueId add_param(const std::string& name, const SourceSpan& span, bool has_default = false);
    BlockId new_block();
    void set_block(BlockId block);
    BlockId current_block() const { return current_; }
    bool terminated() const;
    void add_pred(BlockId block, BlockId pred);
    SiteId next_site() { return next_site_++; }

    void emit(InstructionKind op, const SourceSpan& span);
    /// Insert before the terminator of `block`, or append if none.
    void emit_before_terminator(BlockId block, InstructionKind op, const SourceSpan& span);
    /// Place a phi at the start of `block`.
    void emit_phi(BlockId block, Phi phi, const SourceSpan& span);
    Phi& phi_at(BlockId block, ValueId def);

    void set_name(ValueId v, const std::string& name);
    IRFunction& function() { return fn_; }
    IRFunction take() { return std::move(fn_); }

private:
    IRFunction fn_;
    BlockId current_{0};
    SiteId next_site_ = 0;
};

struct Violation {
    std::string message;
    SourceSpan span;
};

/// Checks SSA single definition, dominance of uses, phi arity, block
/// termination, branch targets, site-id uniqueness and the self parameter of
/// methods. Returns every violation found; empty means valid.
std::vector<Violation> validate(const IRFunction& fn);

std::string to_string(const Literal& lit);
std::string to_string(const Instruction& inst);

/// Deterministic text form used for golden tests.
std::string pretty_print(const IRFunction& fn);

}  // namespace tensorlint::ir

template <>
struct std::hash<tensorlint::ir::ValueId> {
    size_t operator()(const tensorlint::ir::ValueId& v) const noexcept { return std::hash<int>{}(v.id); }
};
