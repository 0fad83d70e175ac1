// Declarative library models.
//
// A model file describes library classes whose methods are given as short
// IR bodies (new, putfield, getfield, call, return). Methods may carry a
// semantics tag naming the shape rule applied at their call sites.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tensorlint/ir.hpp"

namespace tensorlint::model {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The document does not follow the model grammar.
class SchemaError : public ModelError {
public:
    SchemaError(std::string path, std::string pointer, const std::string& message)
        : ModelError(path + ": " + pointer + ": " + message), path_(std::move(path)), pointer_(std::move(pointer)) {}
    const std::string& path() const { return path_; }
    const std::string& pointer() const { return pointer_; }

private:
    std::string path_;
    std::string pointer_;
};

/// An operand names a def that is not defined before its use.
class DanglingReference : public ModelError {
public:
    DanglingReference(std::string name, const std::string& where)
        : ModelError(where + ": reference to undefined '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class UnknownSemanticsTag : public ModelError {
public:
    UnknownSemanticsTag(std::string tag, const std::string& where)
        : ModelError(where + ": unknown semantics tag '" + tag + "'"), tag_(std::move(tag)) {}
    const std::string& tag() const { return tag_; }

private:
    std::string tag_;
};

class UnknownModule : public ModelError {
public:
    explicit UnknownModule(std::string name) : ModelError("no model for module '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// "argN", a def name, or an integer literal.
struct Operand {
    enum class Kind { Arg, Def, Int } kind = Kind::Def;
    int arg = 0;
    std::string def;
    std::int64_t value = 0;
};

struct ModelOp {
    enum class Kind { New, PutField, GetField, Call, Return } kind = Kind::Return;
    std::string def;         // New, GetField, Call
    std::string class_name;  // New
    std::string field;       // PutField, GetField
    Operand ref;             // PutField, GetField: object; Call: callee; Return: value
    Operand value;           // PutField
    std::vector<Operand> args;
};

struct ModelMethod {
    std::string name;
    int num_args = 1;  // including arg0
    std::optional<std::string> semantics;
    std::vector<ModelOp> body;
    /// Names of arg1..argN for keyword matching.
    std::vector<std::string> params;
    bool varargs = false;
    bool kwargs = false;
    std::string output;  // "" or "filters-last"
};

struct ModelClass {
    std::string package;
    std::string name;
    bool allocatable = true;
    std::vector<ModelMethod> methods;

    std::string qualified() const { return package.empty() ? name : package + "/" + name; }
};

struct ModelSpec {
    std::vector<ModelClass> classes;
    /// Synthetic IR per method, keyed by "package/Class.method".
    std::map<std::string, ir::IRFunction> functions;
    /// Module name -> qualified name of its import function.
    std::map<std::string, std::string> modules;
    /// Qualified class name -> module name, for classes that define import.
    std::map<std::string, std::string> module_classes;

    const ModelClass* find_class(const std::string& qualified) const;
    /// Method behind a synthetic function name, or nullptr.
    const ModelMethod* method(const std::string& function_name) const;
    /// Qualified name of the function invoked when an instance of `cls` is
    /// called: its "do" method.
    std::optional<std::string> call_method(const std::string& cls) const;
};

std::string function_name(const ModelClass& cls, const ModelMethod& m);

/// Parses and validates a model document. Throws SchemaError,
/// DanglingReference or UnknownSemanticsTag.
ModelSpec load_model_json(const nlohmann::json& doc, const std::string& path = "<memory>");
ModelSpec load_model(const std::string& path);

/// Adds the packages of `extra` to `spec`. Later definitions of the same
/// class replace earlier ones.
void merge(ModelSpec& spec, const ModelSpec& extra);

/// The synthetic init function for `module`. Throws UnknownModule.
const ir::IRFunction& import_function(const ModelSpec& spec, const std::string& module);

/// Serializes back to the file format.
nlohmann::json to_json(const ModelSpec& spec);

}  // namespace tensorlint::model
