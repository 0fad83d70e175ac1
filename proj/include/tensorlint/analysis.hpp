// Call graph construction and Andersen-style points-to analysis.
//
// Context-insensitive and allocation-site based. The call graph is built on
// the fly: a call site gains targets as the points-to set of its callee
// value grows.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <string>
#include <vector>

#include "json.hpp"
#include "tensorlint/diagnostics.hpp"
#include "tensorlint/ir.hpp"
#include "tensorlint/model.hpp"

namespace tensorlint::analysis {

enum class ObjectKind { AllocSite, Function, Class, Module, BoundMethod, ShapeList, Opaque };

using ObjectId = int;
using NodeId = int;
using FunctionId = int;

struct AbstractObject {
    ObjectKind kind = ObjectKind::Opaque;
    /// AllocSite/ShapeList: allocating function. Function/BoundMethod: target
    /// function. Class: qualified class. Module: module name.
    std::string name;
    ir::SiteId site = -1;
    std::string class_token;  // AllocSite: what was allocated
    ObjectId receiver = -1;   // BoundMethod
    std::optional<ir::ShapeLiteral> shape;
    SourceSpan span;
    /// Allocated by library model code: reads of undeclared fields yield the
    /// opaque object.
    bool open = false;

    bool operator==(const AbstractObject& o) const {
        return kind == o.kind && name == o.name && site == o.site && class_token == o.class_token &&
               receiver == o.receiver;
    }
};

struct Node {
    enum class Kind { Value, Field, Global } kind = Kind::Value;
    FunctionId function = -1;  // Value
    ir::ValueId value;         // Value
    ObjectId object = -1;      // Field
    std::string name;          // Field name, or Global module + "." + name
};

enum class EdgeKind { Copy, Param, Return, Store, Load, Global };

/// Dataflow from `from` to `to` (to ≺ from).
struct Edge {
    NodeId from;
    NodeId to;
    EdgeKind kind = EdgeKind::Copy;
    int call = -1;  // Param/Return: index into DataflowGraph::calls

    bool operator<(const Edge& o) const {
        return std::tie(from, to, kind, call) < std::tie(o.from, o.to, o.kind, o.call);
    }
};

struct CallEdge {
    FunctionId caller;
    ir::SiteId site;
    FunctionId callee;
    /// Caller value bound to each callee parameter, when one is.
    std::vector<std::optional<ir::ValueId>> bindings;
};

struct CallSite {
    FunctionId function;
    ir::SiteId site;
    auto operator<=>(const CallSite&) const = default;
};

struct CallGraph {
    std::vector<std::string> functions;  // reachable functions, by name
    std::map<CallSite, std::set<FunctionId>> targets;
    /// Sites whose callee may be the opaque object.
    std::set<CallSite> opaque_sites;
    /// Sites with no target at all.
    std::set<CallSite> unresolved;

    /// Names of the targets of the site at (function, site).
    std::set<std::string> target_names(const std::string& function, ir::SiteId site) const;
    /// True when some site of `caller` targets `callee`.
    bool has_edge(const std::string& caller, const std::string& callee) const;

    std::vector<std::string> all_functions;  // every known function, by id
};

class UnknownVariable : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

struct DataflowGraph {
    std::vector<ir::FunctionPtr> functions;  // indexed by FunctionId
    std::vector<AbstractObject> objects;
    std::vector<Node> nodes;
    std::vector<std::set<ObjectId>> pts;  // S, per node
    std::set<Edge> edges;
    std::vector<CallEdge> calls;
    std::set<FunctionId> reachable;

    std::optional<FunctionId> function_id(const std::string& name) const;
    std::optional<NodeId> value_node(FunctionId f, ir::ValueId v) const;
    std::optional<NodeId> field_node(ObjectId o, const std::string& field) const;
    std::optional<NodeId> global_node(const std::string& module, const std::string& name) const;
    /// Fields (name -> node) that exist for an object.
    std::map<std::string, NodeId> fields_of(ObjectId o) const;

    std::string describe(ObjectId o) const;
    std::string describe_node(NodeId n) const;

    // lookup tables
    std::map<std::string, FunctionId> function_index;
    std::map<std::pair<FunctionId, int>, NodeId> value_index;
    std::map<std::pair<ObjectId, std::string>, NodeId> field_index;
    std::map<std::string, NodeId> global_index;
};

struct Options {
    /// When set, the worklist is drained in a pseudo-random order.
    std::optional<std::uint64_t> shuffle_seed;
    /// Seeds every points-to set from a previous result.
    const DataflowGraph* warm_start = nullptr;
};

struct Result {
    CallGraph callgraph;
    DataflowGraph graph;
    std::vector<Diagnostic> diagnostics;
};

/// `entry` holds the lowered source modules; each module init is a root.
Result build(const std::vector<ir::FunctionPtr>& entry, const model::ModelSpec& models, const Options& options = {});

/// S(v) for value `v` of function `function`. Throws UnknownVariable.
std::vector<AbstractObject> points_to(const DataflowGraph& g, const std::string& function, ir::ValueId v);

nlohmann::json dump_json(const Result& result);

}  // namespace tensorlint::analysis
