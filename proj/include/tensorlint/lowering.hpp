// Lowering of parsed modules to IR.
#pragma once

#include <string>
#include <vector>

#include "tensorlint/ast.hpp"
#include "tensorlint/ir.hpp"
#include "tensorlint/parser.hpp"

namespace tensorlint {

/// An AST that the parser should never have produced.
class LoweringError : public FrontendError {
public:
    using FrontendError::FrontendError;
};

/// Name of the synthetic function holding a module's top-level statements.
std::string module_init_name(const std::string& module);

/// Name of the synthesized constructor of a class.
std::string constructor_name(const std::string& qualified_class);

/// Module name used for a source path: the file stem.
std::string module_name_for_path(const std::string& path);

/// Lowers a Module AST. The first function is the module init; the rest are
/// user functions, methods and one synthesized constructor per class.
std::vector<ir::IRFunction> lower_module(const AstNode& module, const std::string& module_name);

struct MethodBinding {
    std::string field;   // attribute name on the instance
    std::string target;  // qualified name of the method function
};

/// Constructor for a class: allocates the instance, stores one trampoline
/// per method into the field of the same name and returns the instance.
ir::IRFunction synthesize_class_model(const std::string& qualified_class, const std::string& module,
                                      const std::vector<MethodBinding>& methods, const SourceSpan& span);

}  // namespace tensorlint
