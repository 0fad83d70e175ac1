#include "tensorlint/analysis.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>

#include "tensorlint/lowering.hpp"

namespace tensorlint::analysis {

namespace {

constexpr const char* kFunctionPrefix = "function:";
constexpr const char* kClassPrefix = "class:";
constexpr const char* kInstancePrefix = "instance:";
constexpr const char* kTrampolinePrefix = "trampoline:";
constexpr const char* kModelPrefix = "model:";

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

std::string strip(const std::string& s, const char* prefix) { return s.substr(std::char_traits<char>::length(prefix)); }

std::string object_key(const AbstractObject& o) {
    std::ostringstream os;
    os << static_cast<int>(o.kind) << '|' << o.name << '|' << o.site << '|' << o.class_token << '|' << o.receiver;
    return os.str();
}

struct PendingCall {
    FunctionId caller;
    const ir::Invoke* invoke;
    SourceSpan span;
};

struct LoadC {
    NodeId dst;
    std::string field;
};

struct StoreC {
    NodeId src;
    std::string field;
};

class Solver {
public:
    Solver(const std::vector<ir::FunctionPtr>& entry, const model::ModelSpec& models, const Options& options)
        : models_(models), options_(options), g_(result_.graph) {
        for (const auto& f : entry) add_function(f);
        for (const auto& [name, fn] : models.functions) add_function(std::make_shared<const ir::IRFunction>(fn));
        for (const auto& f : g_.functions) result_.callgraph.all_functions.push_back(f->name);
        if (options.shuffle_seed) rng_.seed(*options.shuffle_seed);
        scan_globals();
        scan_model_fields();
        opaque_ = intern(AbstractObject{});
        for (const auto& f : entry)
            if (f->kind == ir::FunctionKind::ModuleInit) roots_.push_back(*g_.function_id(f->name));
    }

    Result run() {
        if (options_.warm_start) seed(*options_.warm_start);
        for (FunctionId r : roots_) reach(r);
        drain();
        finish();
        return std::move(result_);
    }

private:
    // ---- setup

    void add_function(ir::FunctionPtr f) {
        if (g_.function_index.count(f->name)) return;
        FunctionId id = static_cast<FunctionId>(g_.functions.size());
        g_.function_index[f->name] = id;
        g_.functions.push_back(std::move(f));
    }

    void scan_globals() {
        for (const auto& f : g_.functions) {
            if (f->kind == ir::FunctionKind::Model) continue;
            f->for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& inst) {
                if (auto* w = inst.as<ir::LexicalWrite>()) module_globals_[f->module].insert(w->name);
            });
        }
    }

    // Fields that model code declares on the objects it allocates.
    void scan_model_fields() {
        for (const auto& f : g_.functions) {
            if (f->kind != ir::FunctionKind::Model) continue;
            std::map<int, std::pair<ir::SiteId, std::string>> allocs;
            f->for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& inst) {
                if (auto* n = inst.as<ir::New>()) allocs[n->def.id] = {n->site, n->class_token};
            });
            f->for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& inst) {
                auto* p = inst.as<ir::PutField>();
                if (!p) return;
                if (auto it = allocs.find(p->object.id); it != allocs.end()) {
                    site_fields_[{f->name, it->second.first}].insert(p->field);
                    token_fields_[it->second.second].insert(p->field);
                }
                if (!f->params.empty() && p->object == f->params[0].value && !f->declared_class.empty())
                    token_fields_[f->declared_class].insert(p->field);
            });
        }
    }

    bool declares(const AbstractObject& o, const std::string& field) const {
        auto has = [&](const std::map<std::string, std::set<std::string>>& m, const std::string& k) {
            auto it = m.find(k);
            return it != m.end() && it->second.count(field);
        };
        if (has(token_fields_, o.class_token)) return true;
        if (o.kind == ObjectKind::Module) return false;
        auto it = site_fields_.find({o.name, o.site});
        return it != site_fields_.end() && it->second.count(field);
    }

    // ---- objects and nodes

    ObjectId intern(const AbstractObject& o) {
        auto key = object_key(o);
        auto it = object_index_.find(key);
        if (it != object_index_.end()) return it->second;
        ObjectId id = static_cast<ObjectId>(g_.objects.size());
        g_.objects.push_back(o);
        object_index_[key] = id;
        return id;
    }

    NodeId new_node(Node n) {
        NodeId id = static_cast<NodeId>(g_.nodes.size());
        g_.nodes.push_back(std::move(n));
        g_.pts.emplace_back();
        succ_.emplace_back();
        loads_.emplace_back();
        stores_.emplace_back();
        calls_.emplace_back();
        queued_.push_back(false);
        return id;
    }

    NodeId value_node(FunctionId f, ir::ValueId v) {
        auto key = std::make_pair(f, v.id);
        if (auto it = g_.value_index.find(key); it != g_.value_index.end()) return it->second;
        Node n;
        n.kind = Node::Kind::Value;
        n.function = f;
        n.value = v;
        NodeId id = new_node(n);
        g_.value_index[key] = id;
        return id;
    }

    NodeId field_node(ObjectId o, const std::string& field) {
        auto key = std::make_pair(o, field);
        if (auto it = g_.field_index.find(key); it != g_.field_index.end()) return it->second;
        Node n;
        n.kind = Node::Kind::Field;
        n.object = o;
        n.name = field;
        NodeId id = new_node(n);
        g_.field_index[key] = id;
        if (auto it = star_readers_.find(o); it != star_readers_.end())
            for (NodeId dst : std::set<NodeId>(it->second)) add_edge(id, dst, EdgeKind::Load);
        return id;
    }

    NodeId global_node(const std::string& module, const std::string& name) {
        auto key = module + "." + name;
        if (auto it = g_.global_index.find(key); it != g_.global_index.end()) return it->second;
        Node n;
        n.kind = Node::Kind::Global;
        n.name = key;
        NodeId id = new_node(n);
        g_.global_index[key] = id;
        return id;
    }

    void enqueue(NodeId n) {
        if (queued_[n]) return;
        queued_[n] = true;
        worklist_.push_back(n);
    }

    void add_object(NodeId n, ObjectId o) {
        if (g_.pts[n].insert(o).second) enqueue(n);
    }

    void add_edge(NodeId from, NodeId to, EdgeKind kind, int call = -1) {
        if (!g_.edges.insert(Edge{from, to, kind, call}).second) return;
        if (std::find(succ_[from].begin(), succ_[from].end(), to) == succ_[from].end()) succ_[from].push_back(to);
        for (ObjectId o : std::set<ObjectId>(g_.pts[from])) add_object(to, o);
    }

    void seed(const DataflowGraph& warm) {
        std::vector<ObjectId> remap(warm.objects.size(), -1);
        // Receivers refer to earlier objects, so intern in dependency order.
        std::function<ObjectId(ObjectId)> translate = [&](ObjectId o) -> ObjectId {
            if (remap[o] >= 0) return remap[o];
            AbstractObject copy = warm.objects[o];
            if (copy.receiver >= 0) copy.receiver = translate(copy.receiver);
            return remap[o] = intern(copy);
        };
        for (size_t i = 0; i < warm.nodes.size(); ++i) {
            const Node& n = warm.nodes[i];
            NodeId here = -1;
            switch (n.kind) {
                case Node::Kind::Value: {
                    auto f = g_.function_id(warm.functions[n.function]->name);
                    if (!f) continue;
                    here = value_node(*f, n.value);
                    break;
                }
                case Node::Kind::Field: here = field_node(translate(n.object), n.name); break;
                case Node::Kind::Global: {
                    here = static_cast<NodeId>(g_.nodes.size());
                    Node copy = n;
                    new_node(copy);
                    g_.global_index[n.name] = here;
                    break;
                }
            }
            for (ObjectId o : warm.pts[i]) add_object(here, translate(o));
        }
    }

    // ---- constraint generation

    const ir::IRFunction& fn(FunctionId f) const { return *g_.functions[f]; }

    void reach(FunctionId f) {
        if (!g_.reachable.insert(f).second) return;
        const auto& F = fn(f);
        if (F.kind == ir::FunctionKind::Constructor) return;
        for (size_t v = 0; v < F.value_count(); ++v) value_node(f, ir::ValueId{static_cast<int>(v)});
        F.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& inst) { generate(f, inst); });
    }

    void generate(FunctionId f, const ir::Instruction& inst) {
        const auto& F = fn(f);
        auto V = [&](ir::ValueId v) { return value_node(f, v); };
        if (auto* a = inst.as<ir::Assign>()) {
            add_edge(V(a->use), V(a->def), EdgeKind::Copy);
        } else if (auto* p = inst.as<ir::Phi>()) {
            for (auto u : p->uses) add_edge(V(u), V(p->def), EdgeKind::Copy);
        } else if (auto* n = inst.as<ir::New>()) {
            add_object(V(n->def), allocate(f, *n, inst.span));
        } else if (auto* gf = inst.as<ir::GetField>()) {
            NodeId obj = V(gf->object);
            loads_[obj].push_back({V(gf->def), gf->field});
            enqueue(obj);
        } else if (auto* pf = inst.as<ir::PutField>()) {
            NodeId obj = V(pf->object);
            stores_[obj].push_back({V(pf->value), pf->field});
            enqueue(obj);
        } else if (auto* call = inst.as<ir::Invoke>()) {
            if (auto* st = std::get_if<ir::StaticTarget>(&call->callee)) {
                static_call(f, *call, st->name, inst.span);
            } else {
                NodeId callee = V(std::get<ir::ValueId>(call->callee));
                calls_[callee].push_back({f, call, inst.span});
                enqueue(callee);
            }
        } else if (auto* r = inst.as<ir::LexicalRead>()) {
            auto it = module_globals_.find(F.module);
            if (it != module_globals_.end() && it->second.count(r->name))
                add_edge(global_node(F.module, r->name), V(r->def), EdgeKind::Global);
            else
                add_object(V(r->def), opaque_);
        } else if (auto* w = inst.as<ir::LexicalWrite>()) {
            add_edge(V(w->value), global_node(F.module, w->name), EdgeKind::Global);
        }
    }

    ObjectId allocate(FunctionId f, const ir::New& n, const SourceSpan& span) {
        const auto& F = fn(f);
        AbstractObject o;
        o.span = span;
        const std::string& tok = n.class_token;
        if (starts_with(tok, kFunctionPrefix)) {
            o.kind = ObjectKind::Function;
            o.name = strip(tok, kFunctionPrefix);
        } else if (starts_with(tok, kClassPrefix)) {
            o.kind = ObjectKind::Class;
            o.name = strip(tok, kClassPrefix);
        } else if (auto it = models_.module_classes.find(tok); it != models_.module_classes.end()) {
            o.kind = ObjectKind::Module;
            o.name = it->second;
            o.class_token = tok;
            o.open = true;
        } else if (tok == "list" && n.shape) {
            o.kind = ObjectKind::ShapeList;
            o.name = F.name;
            o.site = n.site;
            o.class_token = tok;
            o.shape = n.shape;
        } else {
            o.kind = ObjectKind::AllocSite;
            o.name = F.name;
            o.site = n.site;
            o.class_token = tok;
            o.open = F.kind == ir::FunctionKind::Model;
        }
        return intern(o);
    }

    // ---- solving

    void drain() {
        while (!worklist_.empty()) {
            if (options_.shuffle_seed && worklist_.size() > 1) {
                std::uniform_int_distribution<size_t> pick(0, worklist_.size() - 1);
                std::swap(worklist_.front(), worklist_[pick(rng_)]);
            }
            NodeId n = worklist_.front();
            worklist_.pop_front();
            queued_[n] = false;
            process(n);
        }
    }

    void process(NodeId n) {
        std::set<ObjectId> objs = g_.pts[n];
        for (size_t i = 0; i < succ_[n].size(); ++i)
            for (ObjectId o : objs) add_object(succ_[n][i], o);
        for (size_t i = 0; i < loads_[n].size(); ++i) {
            LoadC c = loads_[n][i];
            for (ObjectId o : objs) load(o, c);
        }
        for (size_t i = 0; i < stores_[n].size(); ++i) {
            StoreC c = stores_[n][i];
            for (ObjectId o : objs) store(o, c);
        }
        for (size_t i = 0; i < calls_[n].size(); ++i) {
            PendingCall c = calls_[n][i];
            for (ObjectId o : objs) resolve(o, c);
        }
    }

    void load(ObjectId o, const LoadC& c) {
        const AbstractObject& obj = g_.objects[o];
        if (obj.kind == ObjectKind::Opaque) {
            add_object(c.dst, opaque_);
            return;
        }
        if (c.field == ir::kSummaryField) {
            if (!star_readers_[o].insert(c.dst).second) return;
            for (const auto& [name, node] : g_.fields_of(o)) add_edge(node, c.dst, EdgeKind::Load);
            return;
        }
        add_edge(field_node(o, c.field), c.dst, EdgeKind::Load);
        add_edge(field_node(o, ir::kSummaryField), c.dst, EdgeKind::Load);
        if (obj.open && !declares(obj, c.field)) add_object(c.dst, opaque_);
    }

    void store(ObjectId o, const StoreC& c) {
        if (g_.objects[o].kind == ObjectKind::Opaque) return;
        add_edge(c.src, field_node(o, c.field), EdgeKind::Store);
    }

    void resolve(ObjectId o, const PendingCall& c) {
        const AbstractObject obj = g_.objects[o];
        CallSite site{c.caller, c.invoke->site};
        switch (obj.kind) {
            case ObjectKind::Function:
                if (auto t = g_.function_id(obj.name)) bind(c, *t, o, -1);
                break;
            case ObjectKind::BoundMethod:
                if (auto t = g_.function_id(obj.name)) bind(c, *t, o, obj.receiver);
                break;
            case ObjectKind::Class: instantiate(c, o); break;
            case ObjectKind::AllocSite:
                if (!starts_with(obj.class_token, kInstancePrefix))
                    if (auto m = models_.call_method(obj.class_token))
                        if (auto t = g_.function_id(*m)) bind(c, *t, o, -1);
                break;
            case ObjectKind::Opaque:
                result_.callgraph.opaque_sites.insert(site);
                add_object(value_node(c.caller, c.invoke->def), opaque_);
                break;
            case ObjectKind::Module:
            case ObjectKind::ShapeList: break;
        }
    }

    void static_call(FunctionId f, const ir::Invoke& call, const std::string& target, const SourceSpan& span) {
        std::string name = starts_with(target, kModelPrefix) ? strip(target, kModelPrefix) : target;
        const std::string suffix = ".import";
        if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            std::string module = name.substr(0, name.size() - suffix.size());
            auto it = models_.modules.find(module);
            if (it == models_.modules.end()) {
                result_.callgraph.opaque_sites.insert({f, call.site});
                add_object(value_node(f, call.def), opaque_);
                warn(codes::kUnresolvedCall, "no model for module '" + module + "'", span);
                return;
            }
            name = it->second;
        }
        auto t = g_.function_id(name);
        if (!t) {
            result_.callgraph.opaque_sites.insert({f, call.site});
            add_object(value_node(f, call.def), opaque_);
            warn(codes::kUnresolvedCall, "unknown static target '" + name + "'", span);
            return;
        }
        bind(PendingCall{f, &call, span}, *t, -1, -1);
    }

    void instantiate(const PendingCall& c, ObjectId cls) {
        const std::string q = g_.objects[cls].name;
        auto ctor = g_.function_id(constructor_name(q));
        if (!ctor) return;
        AbstractObject inst;
        inst.kind = ObjectKind::AllocSite;
        inst.name = fn(c.caller).name;
        inst.site = c.invoke->site;
        inst.class_token = kInstancePrefix + q;
        inst.span = c.span;
        ObjectId self = intern(inst);
        add_object(value_node(c.caller, c.invoke->def), self);

        result_.callgraph.targets[{c.caller, c.invoke->site}].insert(*ctor);
        g_.reachable.insert(*ctor);

        const auto& C = fn(*ctor);
        std::map<int, std::string> trampolines;
        C.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& i) {
            if (auto* n = i.as<ir::New>(); n && starts_with(n->class_token, kTrampolinePrefix))
                trampolines[n->def.id] = strip(n->class_token, kTrampolinePrefix);
        });
        std::optional<ObjectId> init;
        C.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& i) {
            auto* p = i.as<ir::PutField>();
            if (!p) return;
            auto it = trampolines.find(p->value.id);
            if (it == trampolines.end()) return;
            AbstractObject bm;
            bm.kind = ObjectKind::BoundMethod;
            bm.name = it->second;
            bm.receiver = self;
            bm.span = i.span;
            ObjectId b = intern(bm);
            add_object(field_node(self, p->field), b);
            if (p->field == "__init__") init = b;
        });
        if (init)
            if (auto t = g_.function_id(g_.objects[*init].name)) bind(c, *t, *init, self);
    }

    void bind(const PendingCall& c, FunctionId target, ObjectId callee, ObjectId receiver) {
        reach(target);
        result_.callgraph.targets[{c.caller, c.invoke->site}].insert(target);
        const auto& F = fn(target);
        if (callee >= 0 && !F.params.empty()) add_object(value_node(target, F.params[0].value), callee);
        const int shift = receiver >= 0 ? 1 : 0;
        if (receiver >= 0 && F.params.size() > 1) add_object(value_node(target, F.params[1].value), receiver);

        auto key = std::make_tuple(c.caller, c.invoke->site, target, shift);
        if (call_index_.count(key)) return;
        int idx = static_cast<int>(g_.calls.size());
        call_index_[key] = idx;

        CallEdge edge{c.caller, c.invoke->site, target, std::vector<std::optional<ir::ValueId>>(F.params.size())};
        std::vector<std::string> problems;
        for (size_t i = 0; i < c.invoke->args.size(); ++i) {
            size_t p = 1 + shift + i;
            if (p < F.params.size())
                edge.bindings[p] = c.invoke->args[i];
            else if (!F.accepts_varargs)
                problems.push_back("too many positional arguments");
        }
        for (const auto& kw : c.invoke->keywords) {
            bool found = false;
            for (size_t p = 1; p < F.params.size(); ++p) {
                if (F.params[p].name != kw.name) continue;
                found = true;
                if (edge.bindings[p] || (shift && p == 1))
                    problems.push_back("multiple values for argument '" + kw.name + "'");
                else
                    edge.bindings[p] = kw.value;
            }
            if (!found && !F.accepts_kwargs) problems.push_back("unexpected keyword argument '" + kw.name + "'");
        }
        if (F.kind != ir::FunctionKind::Model) {
            for (size_t p = 1 + shift; p < F.params.size(); ++p)
                if (!edge.bindings[p] && !F.params[p].has_default)
                    problems.push_back("missing argument '" + F.params[p].name + "'");
        }
        if (fn(c.caller).kind != ir::FunctionKind::Model) {
            std::sort(problems.begin(), problems.end());
            problems.erase(std::unique(problems.begin(), problems.end()), problems.end());
            for (auto& p : problems) p = "call to " + F.name + ": " + p;
            auto& m = mismatches_[{c.caller, c.invoke->site}];
            m.span = c.span;
            if (problems.empty()) m.fits = true;
            else if (m.problems.empty()) m.problems = problems;
        }
        g_.calls.push_back(edge);

        for (size_t p = 0; p < edge.bindings.size(); ++p)
            if (edge.bindings[p])
                add_edge(value_node(c.caller, *edge.bindings[p]), value_node(target, F.params[p].value),
                         EdgeKind::Param, idx);
        NodeId def = value_node(c.caller, c.invoke->def);
        F.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& i) {
            if (auto* r = i.as<ir::Return>()) add_edge(value_node(target, r->value), def, EdgeKind::Return, idx);
        });
    }

    void warn(const char* code, const std::string& message, const SourceSpan& span) {
        result_.diagnostics.push_back(Diagnostic{code, Severity::Warning, message, span, {}});
    }

    void finish() {
        auto& cg = result_.callgraph;
        for (FunctionId f : g_.reachable) cg.functions.push_back(fn(f).name);
        for (FunctionId f : g_.reachable) {
            const auto& F = fn(f);
            if (F.kind == ir::FunctionKind::Model || F.kind == ir::FunctionKind::Constructor) continue;
            F.for_each_instruction([&](const ir::BasicBlock&, const ir::Instruction& i) {
                auto* call = i.as<ir::Invoke>();
                if (!call) return;
                CallSite s{f, call->site};
                auto it = cg.targets.find(s);
                if ((it != cg.targets.end() && !it->second.empty()) || cg.opaque_sites.count(s)) return;
                cg.unresolved.insert(s);
                std::string what = "call";
                if (auto* v = std::get_if<ir::ValueId>(&call->callee); v && !F.info(*v).name.empty())
                    what = "call to '" + F.info(*v).name + "'";
                warn(codes::kUnresolvedCall, what + " has no resolved target", i.span);
            });
        }
        // A site is reported only when no binding of it fits.
        for (const auto& [site, m] : mismatches_)
            if (!m.fits)
                for (const auto& p : m.problems) warn(codes::kArgumentMismatch, p, m.span);
        sort_diagnostics(result_.diagnostics);
    }

    const model::ModelSpec& models_;
    Options options_;
    Result result_;
    DataflowGraph& g_;
    ObjectId opaque_ = -1;
    std::vector<FunctionId> roots_;

    std::map<std::string, ObjectId> object_index_;
    std::map<std::string, std::set<std::string>> module_globals_;
    std::map<std::pair<std::string, ir::SiteId>, std::set<std::string>> site_fields_;
    std::map<std::string, std::set<std::string>> token_fields_;

    std::vector<std::vector<NodeId>> succ_;
    std::vector<std::vector<LoadC>> loads_;
    std::vector<std::vector<StoreC>> stores_;
    std::vector<std::vector<PendingCall>> calls_;
    std::map<ObjectId, std::set<NodeId>> star_readers_;
    std::map<std::tuple<FunctionId, ir::SiteId, FunctionId, int>, int> call_index_;
    struct Mismatch {
        SourceSpan span;
        bool fits = false;
        std::vector<std::string> problems;
    };
    std::map<CallSite, Mismatch> mismatches_;

    std::deque<NodeId> worklist_;
    std::vector<bool> queued_;
    std::mt19937_64 rng_;
};

const char* kind_name(ObjectKind k) {
    switch (k) {
        case ObjectKind::AllocSite: return "alloc";
        case ObjectKind::Function: return "function";
        case ObjectKind::Class: return "class";
        case ObjectKind::Module: return "module";
        case ObjectKind::BoundMethod: return "bound";
        case ObjectKind::ShapeList: return "shape";
        case ObjectKind::Opaque: return "opaque";
    }
    return "?";
}

}  // namespace

std::set<std::string> CallGraph::target_names(const std::string& function, ir::SiteId site) const {
    std::set<std::string> out;
    auto f = std::find(all_functions.begin(), all_functions.end(), function);
    if (f == all_functions.end()) return out;
    auto it = targets.find({static_cast<FunctionId>(f - all_functions.begin()), site});
    if (it == targets.end()) return out;
    for (FunctionId t : it->second) out.insert(all_functions[t]);
    return out;
}

bool CallGraph::has_edge(const std::string& caller, const std::string& callee) const {
    for (const auto& [site, ts] : targets) {
        if (all_functions[site.function] != caller) continue;
        for (FunctionId t : ts)
            if (all_functions[t] == callee) return true;
    }
    return false;
}

std::optional<FunctionId> DataflowGraph::function_id(const std::string& name) const {
    auto it = function_index.find(name);
    if (it == function_index.end()) return std::nullopt;
    return it->second;
}

std::optional<NodeId> DataflowGraph::value_node(FunctionId f, ir::ValueId v) const {
    auto it = value_index.find({f, v.id});
    if (it == value_index.end()) return std::nullopt;
    return it->second;
}

std::optional<NodeId> DataflowGraph::field_node(ObjectId o, const std::string& field) const {
    auto it = field_index.find({o, field});
    if (it == field_index.end()) return std::nullopt;
    return it->second;
}

std::optional<NodeId> DataflowGraph::global_node(const std::string& module, const std::string& name) const {
    auto it = global_index.find(module + "." + name);
    if (it == global_index.end()) return std::nullopt;
    return it->second;
}

std::map<std::string, NodeId> DataflowGraph::fields_of(ObjectId o) const {
    std::map<std::string, NodeId> out;
    for (auto it = field_index.lower_bound({o, std::string()}); it != field_index.end() && it->first.first == o; ++it)
        out[it->first.second] = it->second;
    return out;
}

std::string DataflowGraph::describe(ObjectId o) const {
    const auto& obj = objects.at(o);
    std::string s = kind_name(obj.kind);
    switch (obj.kind) {
        case ObjectKind::AllocSite:
        case ObjectKind::ShapeList: s += " " + obj.class_token + "@" + obj.name + "#" + std::to_string(obj.site); break;
        case ObjectKind::BoundMethod: s += " " + obj.name + " on (" + describe(obj.receiver) + ")"; break;
        case ObjectKind::Opaque: break;
        default: s += " " + obj.name; break;
    }
    return s;
}

std::string DataflowGraph::describe_node(NodeId n) const {
    const auto& node = nodes.at(n);
    switch (node.kind) {
        case Node::Kind::Value: {
            const auto& f = *functions.at(node.function);
            std::string s = f.name + ":v" + std::to_string(node.value.id);
            if (!f.info(node.value).name.empty()) s += "(" + f.info(node.value).name + ")";
            return s;
        }
        case Node::Kind::Field: return "[" + describe(node.object) + "]." + node.name;
        case Node::Kind::Global: return "global " + node.name;
    }
    return "?";
}

Result build(const std::vector<ir::FunctionPtr>& entry, const model::ModelSpec& models, const Options& options) {
    return Solver(entry, models, options).run();
}

std::vector<AbstractObject> points_to(const DataflowGraph& g, const std::string& function, ir::ValueId v) {
    auto f = g.function_id(function);
    if (!f) throw UnknownVariable("unknown function '" + function + "'");
    if (v.id < 0 || static_cast<size_t>(v.id) >= g.functions[*f]->value_count())
        throw UnknownVariable(function + " has no value v" + std::to_string(v.id));
    std::vector<AbstractObject> out;
    auto n = g.value_node(*f, v);
    if (!n) return out;
    for (ObjectId o : g.pts[*n]) out.push_back(g.objects[o]);
    return out;
}

nlohmann::json dump_json(const Result& result) {
    nlohmann::json j;
    const auto& cg = result.callgraph;
    nlohmann::json functions = nlohmann::json::array();
    for (const auto& f : cg.functions) functions.push_back(f);
    j["functions"] = functions;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [site, ts] : cg.targets)
        for (FunctionId t : ts)
            edges.push_back({{"caller", cg.all_functions[site.function]},
                             {"site", site.site},
                             {"callee", cg.all_functions[t]}});
    j["edges"] = edges;
    nlohmann::json unresolved = nlohmann::json::array();
    for (const auto& s : cg.unresolved)
        unresolved.push_back({{"caller", cg.all_functions[s.function]}, {"site", s.site}});
    j["unresolved"] = unresolved;
    return j;
}

}  // namespace tensorlint::analysis
