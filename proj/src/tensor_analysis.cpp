#include "tensorlint/tensor_analysis.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <random>

#include "tensorlint/lowering.hpp"

namespace tensorlint::tensor {

using analysis::CallSite;
using analysis::FunctionId;
using analysis::NodeId;
using analysis::ObjectId;
using types::TypePtr;

namespace {

const TypeSet kEmpty;

void insert(TypeSet& set, const TypePtr& t) { set.emplace(types::canonical(t), t); }

std::string require_string(const nlohmann::json& j, const char* key, const std::string& path,
                           const std::string& pointer) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string())
        throw DeclarationError(path + ": " + pointer + "/" + key + ": expected a string");
    return j[key].get<std::string>();
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& path,
                         const std::string& pointer) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw DeclarationError(path + ": " + pointer + ": unknown key '" + it.key() + "'");
}

// Dims with a Sym whose label is bound to a known integer at a call.
TypePtr substitute(const TypePtr& t, const std::map<std::string, std::int64_t>& sub) {
    if (sub.empty()) return t;
    const auto& v = t->v;
    if (auto* tensor = std::get_if<types::TensorType>(&v)) {
        types::TensorType out = *tensor;
        for (auto& d : out.dims)
            for (auto& f : d.factors)
                if (auto* s = std::get_if<types::Sym>(&f))
                    if (auto it = sub.find(s->label); it != sub.end()) f = types::Num{it->second};
        return types::normalize(types::make_tensor(std::move(out)));
    }
    if (auto* rec = std::get_if<types::RecordType>(&v)) {
        std::vector<std::pair<std::string, TypePtr>> fields;
        for (const auto& [name, ft] : rec->fields) fields.emplace_back(name, substitute(ft, sub));
        return types::normalize(types::make_record(std::move(fields)));
    }
    if (auto* fn = std::get_if<types::FunctionType>(&v)) {
        std::vector<std::pair<std::string, TypePtr>> params;
        for (const auto& [name, pt] : fn->params) params.emplace_back(name, substitute(pt, sub));
        return types::normalize(types::make_function(std::move(params), substitute(fn->result, sub)));
    }
    return t;
}

const char* code_for(types::ShapeErrorKind k) {
    using K = types::ShapeErrorKind;
    switch (k) {
        case K::SizeMismatch: return codes::kReshapeSize;
        case K::InvalidFactorization: return codes::kReshapeFactorization;
        case K::MultipleWildcards:
        case K::WildcardUnresolvable: return codes::kReshapeWildcard;
        case K::RankError:
        case K::PlaceholderRankZero: return codes::kConvRank;
        case K::LabelError: return codes::kConvLabel;
        case K::ElementNotNumeric: return codes::kElementNotNumeric;
    }
    return codes::kUnanalyzed;
}

struct TaggedSite {
    CallSite site;
    const ir::Invoke* invoke = nullptr;
    SourceSpan span;
    FunctionId callee = -1;
    int call = -1;  // index into DataflowGraph::calls
    std::string tag;
    const model::ModelMethod* method = nullptr;
};

// Outcome of applying a site's rule to every input combination.
struct Eval {
    TypeSet outputs;
    int passes = 0;
    int fails = 0;
    bool empty_input = false;
    bool unknown = false;  // nothing checkable: top inputs or unknown shape
    std::vector<types::ShapeError> errors;
    std::vector<std::string> warnings;
};

// Shared by propagate, check and dump: indexes over the points-to result.
class Context {
public:
    Context(const analysis::Result& pa, const model::ModelSpec& models, const Config& config)
        : pa_(pa), g_(pa.graph), models_(models), config_(config) {
        for (FunctionId f : g_.reachable) {
            const auto& F = *g_.functions[f];
            if (F.kind == ir::FunctionKind::Constructor) continue;
            F.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& inst) {
                if (auto d = ir::defined_value(inst)) defs_[{f, d->id}] = &inst;
                if (auto* call = inst.as<ir::Invoke>()) invokes_[{f, call->site}] = &inst;
                if (auto* w = inst.as<ir::LexicalWrite>()) writes_[F.module + "." + w->name].push_back({f, w->value});
            });
        }
        for (size_t i = 0; i < g_.calls.size(); ++i) {
            const auto& c = g_.calls[i];
            const auto& callee = *g_.functions[c.callee];
            if (callee.kind != ir::FunctionKind::Model) continue;
            const auto* m = models_.method(callee.name);
            if (!m || !m->semantics) continue;
            auto it = invokes_.find({c.caller, c.site});
            if (it == invokes_.end()) continue;
            TaggedSite s;
            s.site = {c.caller, c.site};
            s.invoke = it->second->as<ir::Invoke>();
            s.span = it->second->span;
            s.callee = c.callee;
            s.call = static_cast<int>(i);
            s.tag = *m->semantics;
            s.method = m;
            sites_.push_back(s);
        }
        std::stable_sort(sites_.begin(), sites_.end(),
                         [](const TaggedSite& a, const TaggedSite& b) { return a.span < b.span; });
    }

    const std::vector<TaggedSite>& sites() const { return sites_; }

    std::optional<NodeId> node(FunctionId f, ir::ValueId v) const { return g_.value_node(f, v); }

    std::optional<ir::ValueId> binding(const TaggedSite& s, size_t index) const {
        const auto& b = g_.calls[s.call].bindings;
        if (index >= b.size()) return std::nullopt;
        return b[index];
    }

    std::optional<NodeId> binding_node(const TaggedSite& s, size_t index) const {
        auto v = binding(s, index);
        if (!v) return std::nullopt;
        return node(s.site.function, *v);
    }

    std::optional<std::int64_t> resolve_int(FunctionId f, ir::ValueId v, int depth = 0) const {
        if (depth > 16) return std::nullopt;
        auto it = defs_.find({f, v.id});
        if (it == defs_.end()) return std::nullopt;
        const ir::Instruction& inst = *it->second;
        if (auto* c = inst.as<ir::Const>()) {
            if (auto* i = std::get_if<std::int64_t>(&c->value)) return *i;
            return std::nullopt;
        }
        if (auto* a = inst.as<ir::Assign>()) return resolve_int(f, a->use, depth + 1);
        if (auto* u = inst.as<ir::UnaryOp>()) {
            auto x = resolve_int(f, u->operand, depth + 1);
            if (!x) return std::nullopt;
            if (u->op == "-") return -*x;
            if (u->op == "+") return *x;
            return std::nullopt;
        }
        if (auto* b = inst.as<ir::BinOp>()) {
            auto l = resolve_int(f, b->lhs, depth + 1);
            auto r = resolve_int(f, b->rhs, depth + 1);
            if (!l || !r) return std::nullopt;
            if (b->op == "+") return *l + *r;
            if (b->op == "-") return *l - *r;
            if (b->op == "*") return *l * *r;
            if (b->op == "//" && *r != 0 && *l >= 0 && *r > 0) return *l / *r;
            return std::nullopt;
        }
        if (auto* p = inst.as<ir::Phi>()) {
            std::optional<std::int64_t> common;
            for (auto u : p->uses) {
                auto x = resolve_int(f, u, depth + 1);
                if (!x || (common && *common != *x)) return std::nullopt;
                common = x;
            }
            return common;
        }
        if (auto* r = inst.as<ir::LexicalRead>()) {
            auto w = writes_.find(g_.functions[f]->module + "." + r->name);
            if (w == writes_.end() || w->second.size() != 1) return std::nullopt;
            return resolve_int(w->second[0].first, w->second[0].second, depth + 1);
        }
        return std::nullopt;
    }

    types::Count count(FunctionId f, std::optional<ir::ValueId> v) const {
        types::Count c;
        if (!v) return c;
        c.value = resolve_int(f, *v);
        if (c.value) return c;
        ir::ValueId cur = *v;
        for (int i = 0; i < 16; ++i) {
            const auto& info = g_.functions[f]->info(cur);
            if (info.is_param) {
                c.name = info.name;
                break;
            }
            auto it = defs_.find({f, cur.id});
            if (it == defs_.end()) break;
            auto* a = it->second->as<ir::Assign>();
            if (!a) break;
            cur = a->use;
        }
        return c;
    }

    std::vector<ir::ShapeLiteral> shapes(const TaggedSite& s, size_t index) const {
        std::vector<std::pair<SourceSpan, ir::ShapeLiteral>> found;
        if (auto n = binding_node(s, index))
            for (ObjectId o : g_.pts[*n]) {
                const auto& obj = g_.objects[o];
                if (obj.kind == analysis::ObjectKind::ShapeList && obj.shape) found.emplace_back(obj.span, *obj.shape);
            }
        std::sort(found.begin(), found.end());
        std::vector<ir::ShapeLiteral> out;
        for (auto& [span, shape] : found) out.push_back(shape);
        return out;
    }

    /// Substitution applied to types returned over call edge `call`.
    const std::map<std::string, std::int64_t>& return_subst(int call) {
        auto it = subst_.find(call);
        if (it != subst_.end()) return it->second;
        auto& out = subst_[call];
        const auto& c = g_.calls[call];
        const auto& callee = *g_.functions[c.callee];
        for (size_t p = 1; p < c.bindings.size() && p < callee.params.size(); ++p) {
            if (!c.bindings[p] || callee.params[p].name.empty()) continue;
            if (auto k = resolve_int(c.caller, *c.bindings[p])) out[callee.params[p].name] = *k;
        }
        return out;
    }

    const analysis::Result& pa_;
    const analysis::DataflowGraph& g_;
    const model::ModelSpec& models_;
    const Config& config_;

    std::map<std::pair<FunctionId, int>, const ir::Instruction*> defs_;
    std::map<CallSite, const ir::Instruction*> invokes_;
    std::map<std::string, std::vector<std::pair<FunctionId, ir::ValueId>>> writes_;
    std::vector<TaggedSite> sites_;
    std::map<int, std::map<std::string, std::int64_t>> subst_;
};

// Applies the rule of a tagged site to the current estimate.
class Transfer {
public:
    Transfer(const Context& ctx, const std::vector<TaggedSite>& sites) : ctx_(ctx) {
        // Fresh placeholder labels are numbered in source order.
        int fresh = 1;
        for (size_t i = 0; i < sites.size(); ++i) {
            const auto& s = sites[i];
            if (s.tag != "placeholder") continue;
            Eval e;
            auto shapes = ctx.shapes(s, 2);
            if (shapes.empty()) {
                e.unknown = true;
                insert(e.outputs, types::make_top());
            }
            for (const auto& shape : shapes) {
                auto r = types::placeholder_type(shape, fresh);
                if (r.ok()) {
                    ++e.passes;
                    insert(e.outputs, types::normalize(types::make_tensor(*r.value)));
                } else {
                    ++e.fails;
                    e.errors.push_back(*r.error);
                    insert(e.outputs, types::make_top());
                }
            }
            placeholders_[i] = e;
        }
    }

    Eval evaluate(size_t index, const TaggedSite& s, const std::vector<TypeSet>& T) const {
        if (auto it = placeholders_.find(index); it != placeholders_.end()) return it->second;
        Eval e;
        const auto& tag = s.tag;
        if (tag == "opaque") {
            const auto& bindings = ctx_.g_.calls[s.call].bindings;
            for (size_t p = 1; p < bindings.size(); ++p)
                if (auto n = ctx_.binding_node(s, p); n && !T[*n].empty()) insert(e.outputs, types::make_top());
            e.unknown = true;
            return e;
        }
        auto input = ctx_.binding_node(s, 1);
        const TypeSet& in = input ? T[*input] : kEmpty;
        if (in.empty()) {
            e.empty_input = true;
            return e;
        }
        std::vector<ir::ShapeLiteral> shapes;
        if (tag == "reshape") shapes = ctx_.shapes(s, 2);
        types::CheckConfig cfg = ctx_.config_.check;
        cfg.filters_last = s.method && s.method->output == "filters-last";
        FunctionId f = s.site.function;

        auto record = [&](const types::Outcome<types::TensorType>& r) {
            for (const auto& w : r.warnings) e.warnings.push_back(w);
            if (r.ok()) {
                ++e.passes;
                insert(e.outputs, types::normalize(types::make_tensor(*r.value)));
            } else {
                ++e.fails;
                e.errors.push_back(*r.error);
                insert(e.outputs, types::make_top());
            }
        };
        bool any_tensor = false;
        for (const auto& [key, t] : in) {
            const auto* tensor = types::as_tensor(*t);
            if (!tensor) {
                insert(e.outputs, types::make_top());
                continue;
            }
            any_tensor = true;
            if (tag == "reshape") {
                if (shapes.empty()) insert(e.outputs, types::make_top());
                for (const auto& shape : shapes) record(types::reshape_apply(*tensor, shape));
            } else if (tag == "conv2d") {
                record(types::conv2d_check(*tensor, ctx_.count(f, ctx_.binding(s, 2)), cfg));
            } else if (tag == "conv3d") {
                record(types::conv3d_check(*tensor, ctx_.count(f, ctx_.binding(s, 2)), cfg));
            } else if (tag == "max_pooling2d") {
                auto pool = ctx_.binding(s, 2) ? ctx_.resolve_int(f, *ctx_.binding(s, 2)) : std::nullopt;
                auto stride = ctx_.binding(s, 3) ? ctx_.resolve_int(f, *ctx_.binding(s, 3)) : std::nullopt;
                record(types::pool2d_apply(*tensor, pool, stride, cfg));
            } else if (tag == "flatten") {
                record(types::flatten_apply(*tensor));
            } else if (tag == "dense") {
                record(types::dense_apply(*tensor, ctx_.count(f, ctx_.binding(s, 2))));
            } else {
                // dropout, identity
                ++e.passes;
                insert(e.outputs, t);
            }
        }
        if (!any_tensor || (tag == "reshape" && shapes.empty())) e.unknown = e.passes == 0 && e.fails == 0;
        return e;
    }

private:
    const Context& ctx_;
    std::map<size_t, Eval> placeholders_;
};

class Engine {
public:
    Engine(const analysis::Result& pa, const std::vector<InputDeclaration>& decls, const model::ModelSpec& models,
           const Config& config)
        : ctx_(pa, models, config), g_(pa.graph), transfer_(ctx_, ctx_.sites()), config_(config), decls_(decls) {
        const size_t n = g_.nodes.size();
        est_.T.resize(n);
        out_.resize(n);
        projections_.resize(n);
        site_inputs_.resize(n);
        queued_.assign(n, false);
        widened_.assign(n, false);
        if (config.shuffle_seed) rng_.seed(*config.shuffle_seed);

        for (const auto& e : g_.edges) out_.at(e.from).emplace_back(e.to, e.kind == analysis::EdgeKind::Return ? e.call : -1);
        for (auto& succ : out_) {
            std::sort(succ.begin(), succ.end());
            succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        }
        for (const auto& [key, inst] : ctx_.defs_) {
            auto* gf = inst->as<ir::GetField>();
            if (!gf || gf->field == ir::kSummaryField) continue;
            auto obj = ctx_.node(key.first, gf->object);
            auto dst = ctx_.node(key.first, gf->def);
            if (obj && dst) projections_[*obj].push_back({*dst, gf->field});
        }
        // Arithmetic and calls into unmodeled code turn known inputs into top.
        auto top_edge = [&](FunctionId f, ir::ValueId from, ir::ValueId to) {
            auto a = ctx_.node(f, from);
            auto b = ctx_.node(f, to);
            if (a && b) top_edges_[*a].push_back(*b);
        };
        for (const auto& [key, inst] : ctx_.defs_) {
            FunctionId f = key.first;
            if (auto* b = inst->as<ir::BinOp>()) {
                top_edge(f, b->lhs, b->def);
                top_edge(f, b->rhs, b->def);
            } else if (auto* u = inst->as<ir::UnaryOp>()) {
                top_edge(f, u->operand, u->def);
            } else if (auto* call = inst->as<ir::Invoke>()) {
                if (!pa.callgraph.opaque_sites.count({f, call->site})) continue;
                for (auto a : call->args) top_edge(f, a, call->def);
                for (const auto& kw : call->keywords) top_edge(f, kw.value, call->def);
            }
        }
    }

    TensorEstimate run() {
        seed_declarations();
        const auto& sites = ctx_.sites();
        for (size_t i = 0; i < sites.size(); ++i) {
            const auto& s = sites[i];
            if (est_.declared_sites.count(s.site)) continue;
            if (s.tag == "opaque") {
                const auto& bindings = g_.calls[s.call].bindings;
                for (size_t p = 1; p < bindings.size(); ++p)
                    if (auto n = ctx_.binding_node(s, p)) site_inputs_[*n].push_back(i);
            } else if (auto n = ctx_.binding_node(s, 1)) {
                site_inputs_[*n].push_back(i);
            }
            if (s.tag == "placeholder") apply_site(i);
        }
        drain();
        sort_diagnostics(est_.diagnostics);
        return std::move(est_);
    }

private:
    struct Projection {
        NodeId dst;
        std::string field;
    };

    void seed_declarations() {
        for (const auto& d : decls_) {
            bool resolved = false;
            if (d.kind == InputDeclaration::Kind::CallResult) {
                std::string cls = d.callee;
                std::replace(cls.begin(), cls.end(), '.', '/');
                auto target = ctx_.models_.call_method(cls);
                for (const auto& c : g_.calls) {
                    if (!target || g_.functions[c.callee]->name != *target) continue;
                    auto it = ctx_.invokes_.find({c.caller, c.site});
                    if (it == ctx_.invokes_.end()) continue;
                    auto n = ctx_.node(c.caller, it->second->as<ir::Invoke>()->def);
                    if (!n) continue;
                    est_.declared_sites.insert({c.caller, c.site});
                    add(*n, {{types::canonical(d.type), d.type}});
                    resolved = true;
                }
            } else if (auto f = g_.function_id(d.function)) {
                const auto& F = *g_.functions[*f];
                for (size_t p = 1; p < F.params.size(); ++p) {
                    if (F.params[p].name != d.param) continue;
                    if (auto n = ctx_.node(*f, F.params[p].value)) {
                        add(*n, {{types::canonical(d.type), d.type}});
                        resolved = true;
                    }
                }
            }
            if (!resolved) {
                std::string what = d.kind == InputDeclaration::Kind::CallResult
                                       ? "call-result selector '" + d.callee + "'"
                                       : "parameter selector '" + d.function + "(" + d.param + ")'";
                est_.diagnostics.push_back(
                    Diagnostic{codes::kUnresolvedSelector, Severity::Warning, what + " matches no program point", d.origin, {}});
            }
        }
    }

    SourceSpan span_of(NodeId n) const {
        const auto& node = g_.nodes[n];
        switch (node.kind) {
            case analysis::Node::Kind::Value: return g_.functions[node.function]->info(node.value).span;
            case analysis::Node::Kind::Field: return g_.objects[node.object].span;
            case analysis::Node::Kind::Global: break;
        }
        return {};
    }

    void add(NodeId n, const TypeSet& types) {
        if (widened_[n]) return;
        auto& T = est_.T[n];
        bool changed = false;
        for (const auto& [k, t] : types) changed |= T.emplace(k, t).second;
        if (!changed) return;
        if (T.size() > config_.widen_cap) {
            T.clear();
            insert(T, types::make_top());
            widened_[n] = true;
            est_.diagnostics.push_back(Diagnostic{codes::kWidening, Severity::Warning,
                                                  "estimate of " + g_.describe_node(n) + " exceeded " +
                                                      std::to_string(config_.widen_cap) + " types; widened to top",
                                                  span_of(n), {}});
        }
        enqueue(n);
    }

    void enqueue(NodeId n) {
        if (queued_[n]) return;
        queued_[n] = true;
        worklist_.push_back(n);
    }

    void apply_site(size_t i) {
        const auto& s = ctx_.sites()[i];
        Eval e = transfer_.evaluate(i, s, est_.T);
        if (e.outputs.empty()) return;
        if (auto def = ctx_.node(s.site.function, s.invoke->def)) add(*def, e.outputs);
    }

    void drain() {
        while (!worklist_.empty()) {
            if (config_.shuffle_seed && worklist_.size() > 1) {
                std::uniform_int_distribution<size_t> pick(0, worklist_.size() - 1);
                std::swap(worklist_.front(), worklist_[pick(rng_)]);
            }
            NodeId n = worklist_.front();
            worklist_.pop_front();
            queued_[n] = false;
            const TypeSet cur = est_.T[n];
            for (const auto& [to, call] : out_[n]) {
                if (call < 0) {
                    add(to, cur);
                    continue;
                }
                const auto& sub = ctx_.return_subst(call);
                TypeSet mapped;
                for (const auto& [k, t] : cur) insert(mapped, substitute(t, sub));
                add(to, mapped);
            }
            for (const auto& p : projections_[n]) {
                TypeSet fields;
                for (const auto& [k, t] : cur)
                    if (auto ft = types::record_field(*t, p.field)) insert(fields, ft);
                if (!fields.empty()) add(p.dst, fields);
            }
            for (size_t i : site_inputs_[n]) apply_site(i);
            if (!cur.empty())
                for (NodeId to : top_edges_[n]) add(to, {{types::canonical(types::make_top()), types::make_top()}});
        }
    }

    Context ctx_;
    const analysis::DataflowGraph& g_;
    Transfer transfer_;
    const Config& config_;
    const std::vector<InputDeclaration>& decls_;
    TensorEstimate est_;

    std::vector<std::vector<std::pair<NodeId, int>>> out_;
    std::vector<std::vector<Projection>> projections_;
    std::vector<std::vector<size_t>> site_inputs_;
    std::map<NodeId, std::vector<NodeId>> top_edges_;
    std::vector<bool> queued_;
    std::vector<bool> widened_;
    std::deque<NodeId> worklist_;
    std::mt19937_64 rng_;
};

// Cartesian product of per-key type sets, capped.
std::vector<std::vector<std::pair<std::string, TypePtr>>> combinations(
    const std::vector<std::pair<std::string, TypeSet>>& parts, size_t cap) {
    std::vector<std::vector<std::pair<std::string, TypePtr>>> out{{}};
    for (const auto& [name, set] : parts) {
        std::vector<std::vector<std::pair<std::string, TypePtr>>> next;
        for (const auto& prefix : out)
            for (const auto& [k, t] : set) {
                if (next.size() >= cap) break;
                auto row = prefix;
                row.emplace_back(name, t);
                next.push_back(std::move(row));
            }
        out = std::move(next);
    }
    return out;
}

bool only_top(const TypeSet& s) {
    return std::all_of(s.begin(), s.end(), [](const auto& kv) { return types::is_top(*kv.second); });
}

class Viewer {
public:
    Viewer(const analysis::Result& pa, const TensorEstimate& est) : g_(pa.graph), est_(est) {}

    TypeSet value(FunctionId f, ir::ValueId v) const {
        TypeSet out;
        auto n = g_.value_node(f, v);
        if (!n) return out;
        out = est_.at(*n);
        for (ObjectId o : g_.pts[*n])
            for (auto& [k, t] : record(o)) out.emplace(k, t);
        return out;
    }

    TypeSet record(ObjectId o) const {
        std::vector<std::pair<std::string, TypeSet>> parts;
        for (const auto& [name, node] : g_.fields_of(o)) {
            if (name == ir::kSummaryField || name.empty() || name[0] == '$') continue;
            const auto& T = est_.at(node);
            if (!T.empty()) parts.emplace_back(name, T);
        }
        TypeSet out;
        if (parts.empty()) return out;
        for (auto& row : combinations(parts, kCap)) insert(out, types::normalize(types::make_record(row)));
        return out;
    }

    TypeSet function(const std::string& name) const {
        TypeSet out;
        auto f = g_.function_id(name);
        if (!f || !g_.reachable.count(*f)) return out;
        const auto& F = *g_.functions[*f];
        std::vector<std::pair<std::string, TypeSet>> parts;
        for (size_t p = 1; p < F.params.size(); ++p) {
            auto T = value(*f, F.params[p].value);
            if (!T.empty() && !only_top(T)) parts.emplace_back(F.params[p].name, T);
        }
        TypeSet results;
        F.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& inst) {
            if (auto* r = inst.as<ir::Return>())
                for (auto& [k, t] : value(*f, r->value)) results.emplace(k, t);
        });
        if (results.empty()) insert(results, types::make_top());
        if (parts.empty() && only_top(results)) return out;
        for (auto& row : combinations(parts, kCap))
            for (const auto& [k, r] : results) {
                insert(out, types::normalize(types::make_function(row, r)));
                if (out.size() >= kCap) return out;
            }
        return out;
    }

private:
    static constexpr size_t kCap = 16;
    const analysis::DataflowGraph& g_;
    const TensorEstimate& est_;
};

}  // namespace

const TypeSet& TensorEstimate::at(NodeId n) const {
    if (n < 0 || static_cast<size_t>(n) >= T.size()) return kEmpty;
    return T[n];
}

std::vector<InputDeclaration> load_declarations(const nlohmann::json& doc, const std::string& path) {
    if (!doc.is_object() || !doc.contains("declarations") || !doc["declarations"].is_array())
        throw DeclarationError(path + ": expected an object with a \"declarations\" array");
    reject_unknown_keys(doc, {"declarations"}, path, "");
    std::vector<InputDeclaration> out;
    const auto& list = doc["declarations"];
    for (size_t i = 0; i < list.size(); ++i) {
        const std::string ptr = "/declarations/" + std::to_string(i);
        const auto& d = list[i];
        if (!d.is_object()) throw DeclarationError(path + ": " + ptr + ": expected an object");
        reject_unknown_keys(d, {"selector", "type"}, path, ptr);
        if (!d.contains("selector") || !d["selector"].is_object())
            throw DeclarationError(path + ": " + ptr + "/selector: expected an object");
        const auto& sel = d["selector"];
        InputDeclaration decl;
        decl.origin = SourceSpan{path, 1, 1, 1, 1};
        std::string kind = require_string(sel, "kind", path, ptr + "/selector");
        if (kind == "call-result") {
            reject_unknown_keys(sel, {"kind", "callee"}, path, ptr + "/selector");
            decl.kind = InputDeclaration::Kind::CallResult;
            decl.callee = require_string(sel, "callee", path, ptr + "/selector");
        } else if (kind == "parameter") {
            reject_unknown_keys(sel, {"kind", "function", "param"}, path, ptr + "/selector");
            decl.kind = InputDeclaration::Kind::Parameter;
            decl.function = require_string(sel, "function", path, ptr + "/selector");
            decl.param = require_string(sel, "param", path, ptr + "/selector");
        } else {
            throw DeclarationError(path + ": " + ptr + "/selector/kind: unknown selector kind '" + kind + "'");
        }
        std::string text = require_string(d, "type", path, ptr);
        try {
            decl.type = types::parse_type(text);
        } catch (const types::TypeSyntaxError& e) {
            throw DeclarationError(path + ": " + ptr + "/type: " + e.what());
        }
        out.push_back(std::move(decl));
    }
    return out;
}

std::vector<InputDeclaration> load_declarations_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DeclarationError(path + ": cannot open");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DeclarationError(path + ": " + e.what());
    }
    return load_declarations(doc, path);
}

TensorEstimate propagate(const analysis::Result& pa, const std::vector<InputDeclaration>& decls,
                         const model::ModelSpec& models, const Config& config) {
    return Engine(pa, decls, models, config).run();
}

TypeSet estimate_of(const analysis::Result& pa, const TensorEstimate& est, const std::string& function,
                    ir::ValueId v) {
    auto f = pa.graph.function_id(function);
    if (!f) return {};
    auto n = pa.graph.value_node(*f, v);
    return n ? est.at(*n) : TypeSet{};
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Verified: return "verified";
        case Verdict::Partial: return "partial";
        case Verdict::Failed: return "failed";
        case Verdict::Unanalyzed: return "unanalyzed";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

CheckResult check(const analysis::Result& pa, const TensorEstimate& est, const model::ModelSpec& models,
                  const Config& config) {
    Context ctx(pa, models, config);
    Transfer transfer(ctx, ctx.sites());
    CheckResult out;
    const auto& sites = ctx.sites();
    for (size_t i = 0; i < sites.size(); ++i) {
        const auto& s = sites[i];
        const auto& caller = *pa.graph.functions[s.site.function];
        if (caller.kind == ir::FunctionKind::Model) continue;
        if (est.declared_sites.count(s.site)) continue;
        if (s.tag == "opaque") continue;
        Eval e = transfer.evaluate(i, s, est.T);
        SiteReport report{s.span, s.tag, pa.graph.functions[s.callee]->name, Verdict::Unknown};
        if (e.empty_input) {
            report.verdict = Verdict::Unanalyzed;
            out.diagnostics.push_back(Diagnostic{codes::kUnanalyzed, Severity::Info,
                                                 s.tag + ": tensor argument has no estimate", s.span, {}});
        } else if (e.fails > 0) {
            std::sort(e.errors.begin(), e.errors.end(),
                      [](const auto& a, const auto& b) { return a.message < b.message; });
            const auto& err = e.errors.front();
            bool all = e.passes == 0;
            report.verdict = all ? Verdict::Failed : Verdict::Partial;
            std::string msg = s.tag + ": " + err.message;
            if (!all)
                msg += " (for " + std::to_string(e.fails) + " of " + std::to_string(e.fails + e.passes) +
                       " input combinations)";
            out.diagnostics.push_back(
                Diagnostic{code_for(err.kind), all ? Severity::Error : Severity::Warning, msg, s.span, {}});
        } else if (e.passes > 0) {
            report.verdict = Verdict::Verified;
        }
        std::sort(e.warnings.begin(), e.warnings.end());
        e.warnings.erase(std::unique(e.warnings.begin(), e.warnings.end()), e.warnings.end());
        for (const auto& w : e.warnings)
            out.diagnostics.push_back(Diagnostic{codes::kPoolRemainder, Severity::Warning, s.tag + ": " + w, s.span, {}});
        out.sites.push_back(report);
    }
    sort_diagnostics(out.diagnostics);
    return out;
}

std::vector<TypeLine> dump_types(const analysis::Result& pa, const TensorEstimate& est) {
    const auto& g = pa.graph;
    Viewer view(pa, est);
    std::map<std::pair<std::string, int>, TypeSet> lines;
    for (FunctionId f : g.reachable) {
        const auto& F = *g.functions[f];
        if (F.kind == ir::FunctionKind::Model || F.kind == ir::FunctionKind::Constructor) continue;
        F.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& inst) {
            if (inst.as<ir::Phi>()) return;
            auto d = ir::defined_value(inst);
            if (!d || F.info(*d).name.empty()) return;
            TypeSet T;
            auto* n = inst.as<ir::New>();
            if (n && n->class_token.rfind("function:", 0) == 0)
                T = view.function(n->class_token.substr(9));
            else
                T = view.value(f, *d);
            if (T.empty()) return;
            lines[{inst.span.file, inst.span.line_start}] = std::move(T);
        });
    }
    std::vector<TypeLine> out;
    for (auto& [key, T] : lines) {
        TypeLine line{key.first, key.second, {}};
        for (auto& [k, t] : T) line.types.push_back(t);
        out.push_back(std::move(line));
    }
    return out;
}

std::string format_type_line(const TypeLine& line) {
    std::string s = line.file + ":" + std::to_string(line.line) + ": ";
    if (line.types.size() == 1) return s + types::to_string(line.types.front());
    s += "{";
    for (size_t i = 0; i < line.types.size(); ++i) s += (i ? ", " : "") + types::to_string(line.types[i]);
    return s + "}";
}

}  // namespace tensorlint::tensor
