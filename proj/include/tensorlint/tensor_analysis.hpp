// Tensor estimates over the dataflow graph.
//
// Declared inputs seed the estimate; types then flow along dataflow edges,
// through record fields and across calls, and tagged library calls apply
// their shape rules. check() turns failed rules into diagnostics.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tensorlint/analysis.hpp"
#include "tensorlint/diagnostics.hpp"
#include "tensorlint/model.hpp"
#include "tensorlint/types.hpp"

namespace tensorlint::tensor {

struct InputDeclaration {
    enum class Kind { CallResult, Parameter } kind = Kind::CallResult;
    std::string callee;    // CallResult: dotted library path
    std::string function;  // Parameter: qualified function name
    std::string param;     // Parameter
    types::TypePtr type;
    SourceSpan origin;     // where the declaration was read from
};

class DeclarationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a sidecar `{"declarations": [...]}` document. Throws DeclarationError.
std::vector<InputDeclaration> load_declarations(const nlohmann::json& doc, const std::string& path = "<memory>");
std::vector<InputDeclaration> load_declarations_file(const std::string& path);

struct Config {
    types::CheckConfig check;
    std::size_t widen_cap = 16;
    /// Drain the worklist in a pseudo-random order.
    std::optional<std::uint64_t> shuffle_seed;
};

/// Set of types keyed by canonical spelling.
using TypeSet = std::map<std::string, types::TypePtr>;

struct TensorEstimate {
    std::vector<TypeSet> T;  // per dataflow node
    /// Call sites whose result is fixed by a declaration.
    std::set<analysis::CallSite> declared_sites;
    std::vector<Diagnostic> diagnostics;  // widening, unresolved selectors

    const TypeSet& at(analysis::NodeId n) const;
};

TensorEstimate propagate(const analysis::Result& pa, const std::vector<InputDeclaration>& decls,
                         const model::ModelSpec& models, const Config& config = {});

/// T for value `v` of `function`; empty when the value was never reached.
TypeSet estimate_of(const analysis::Result& pa, const TensorEstimate& est, const std::string& function,
                    ir::ValueId v);

enum class Verdict { Verified, Partial, Failed, Unanalyzed, Unknown };

const char* to_string(Verdict v);

struct SiteReport {
    SourceSpan span;
    std::string tag;
    std::string api;  // model function name
    Verdict verdict = Verdict::Unknown;
};

struct CheckResult {
    std::vector<Diagnostic> diagnostics;
    std::vector<SiteReport> sites;
};

CheckResult check(const analysis::Result& pa, const TensorEstimate& est, const model::ModelSpec& models,
                  const Config& config = {});

struct TypeLine {
    std::string file;
    int line = 0;
    std::vector<types::TypePtr> types;  // sorted by canonical spelling
};

/// One entry per source line that owns a named def with a non-empty view.
std::vector<TypeLine> dump_types(const analysis::Result& pa, const TensorEstimate& est);

/// `file:line: type`, or `file:line: {t1, t2}` for several types.
std::string format_type_line(const TypeLine& line);

}  // namespace tensorlint::tensor
