#include "tensorlint/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "tensorlint/types.hpp"

namespace tensorlint::model {

using nlohmann::json;

std::string function_name(const ModelClass& cls, const ModelMethod& m) { return cls.qualified() + "." + m.name; }

const ModelClass* ModelSpec::find_class(const std::string& qualified) const {
    for (const auto& c : classes) {
        if (c.qualified() == qualified) return &c;
    }
    return nullptr;
}

const ModelMethod* ModelSpec::method(const std::string& fn) const {
    auto dot = fn.rfind('.');
    if (dot == std::string::npos) return nullptr;
    const ModelClass* cls = find_class(fn.substr(0, dot));
    if (!cls) return nullptr;
    for (const auto& m : cls->methods) {
        if (m.name == fn.substr(dot + 1)) return &m;
    }
    return nullptr;
}

std::optional<std::string> ModelSpec::call_method(const std::string& cls) const {
    const ModelClass* c = find_class(cls);
    if (!c) return std::nullopt;
    for (const auto& m : c->methods) {
        if (m.name == "do") return function_name(*c, m);
    }
    return std::nullopt;
}

namespace {

class Reader {
public:
    explicit Reader(std::string path) : path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
        throw SchemaError(path_, pointer.empty() ? "/" : pointer, message);
    }

    const json& member(const json& obj, const std::string& key, const std::string& ptr) const {
        auto it = obj.find(key);
        if (it == obj.end()) fail(ptr, "missing member '" + key + "'");
        return *it;
    }

    std::string string_member(const json& obj, const std::string& key, const std::string& ptr) const {
        const json& v = member(obj, key, ptr);
        if (!v.is_string()) fail(ptr + "/" + key, "expected a string");
        return v.get<std::string>();
    }

    void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& ptr) const {
        if (!obj.is_object()) fail(ptr, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
            if (!ok) fail(ptr + "/" + it.key(), "unexpected member");
        }
    }

    Operand operand(const json& v, const std::string& ptr) const {
        Operand op;
        if (v.is_object()) {
            only_keys(v, {"int"}, ptr);
            const json& n = member(v, "int", ptr);
            if (!n.is_number_integer()) fail(ptr + "/int", "expected an integer");
            op.kind = Operand::Kind::Int;
            op.value = n.get<std::int64_t>();
            return op;
        }
        if (!v.is_string()) fail(ptr, "expected an operand string or {\"int\": n}");
        std::string s = v.get<std::string>();
        if (s.empty()) fail(ptr, "empty operand");
        if (s.size() > 3 && s.compare(0, 3, "arg") == 0 &&
            std::all_of(s.begin() + 3, s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            op.kind = Operand::Kind::Arg;
            op.arg = std::stoi(s.substr(3));
            return op;
        }
        op.kind = Operand::Kind::Def;
        op.def = s;
        return op;
    }

    ModelOp op(const json& v, const std::string& ptr) const {
        if (!v.is_object()) fail(ptr, "expected an object");
        std::string kind = string_member(v, "op", ptr);
        ModelOp o;
        if (kind == "new") {
            only_keys(v, {"op", "def", "class"}, ptr);
            o.kind = ModelOp::Kind::New;
            o.def = string_member(v, "def", ptr);
            o.class_name = string_member(v, "class", ptr);
        } else if (kind == "putfield") {
            only_keys(v, {"op", "ref", "field", "value"}, ptr);
            o.kind = ModelOp::Kind::PutField;
            o.ref = operand(member(v, "ref", ptr), ptr + "/ref");
            o.field = string_member(v, "field", ptr);
            o.value = operand(member(v, "value", ptr), ptr + "/value");
        } else if (kind == "getfield") {
            only_keys(v, {"op", "ref", "field", "def"}, ptr);
            o.kind = ModelOp::Kind::GetField;
            o.ref = operand(member(v, "ref", ptr), ptr + "/ref");
            o.field = string_member(v, "field", ptr);
            o.def = string_member(v, "def", ptr);
        } else if (kind == "call") {
            only_keys(v, {"op", "receiver", "args", "def"}, ptr);
            o.kind = ModelOp::Kind::Call;
            o.ref = operand(member(v, "receiver", ptr), ptr + "/receiver");
            const json& args = member(v, "args", ptr);
            if (!args.is_array()) fail(ptr + "/args", "expected an array");
            for (size_t i = 0; i < args.size(); ++i) o.args.push_back(operand(args[i], ptr + "/args/" + std::to_string(i)));
            o.def = string_member(v, "def", ptr);
        } else if (kind == "return") {
            only_keys(v, {"op", "value"}, ptr);
            o.kind = ModelOp::Kind::Return;
            o.ref = operand(member(v, "value", ptr), ptr + "/value");
        } else {
            fail(ptr + "/op", "unknown op '" + kind + "'");
        }
        if (!o.def.empty() && (o.def.compare(0, 3, "arg") == 0 && o.def.size() > 3 &&
                               std::all_of(o.def.begin() + 3, o.def.end(), [](char c) { return c >= '0' && c <= '9'; }))) {
            fail(ptr + "/def", "def name '" + o.def + "' is reserved for parameters");
        }
        return o;
    }

    ModelMethod method(const json& v, const std::string& ptr) const {
        only_keys(v, {"name", "numArgs", "semantics", "body", "params", "varargs", "kwargs", "output"}, ptr);
        ModelMethod m;
        m.name = string_member(v, "name", ptr);
        const json& n = member(v, "numArgs", ptr);
        if (!n.is_number_integer() || n.get<int>() < 1) fail(ptr + "/numArgs", "expected an integer >= 1");
        m.num_args = n.get<int>();
        const json& sem = member(v, "semantics", ptr);
        if (sem.is_string()) {
            m.semantics = sem.get<std::string>();
            if (!types::has_transfer(*m.semantics)) throw UnknownSemanticsTag(*m.semantics, path_ + ": " + ptr);
        } else if (!sem.is_null()) {
            fail(ptr + "/semantics", "expected null or a tag");
        }
        const json& body = member(v, "body", ptr);
        if (!body.is_array()) fail(ptr + "/body", "expected an array");
        for (size_t i = 0; i < body.size(); ++i) m.body.push_back(op(body[i], ptr + "/body/" + std::to_string(i)));
        if (auto it = v.find("params"); it != v.end()) {
            if (!it->is_array()) fail(ptr + "/params", "expected an array");
            for (const auto& p : *it) {
                if (!p.is_string()) fail(ptr + "/params", "expected strings");
                m.params.push_back(p.get<std::string>());
            }
            if (static_cast<int>(m.params.size()) > m.num_args - 1) fail(ptr + "/params", "more names than arguments");
        }
        for (const char* flag : {"varargs", "kwargs"}) {
            if (auto it = v.find(flag); it != v.end()) {
                if (!it->is_boolean()) fail(ptr + "/" + flag, "expected a boolean");
                (std::string(flag) == "varargs" ? m.varargs : m.kwargs) = it->get<bool>();
            }
        }
        if (auto it = v.find("output"); it != v.end()) {
            if (!it->is_string() || it->get<std::string>() != "filters-last") {
                fail(ptr + "/output", "expected \"filters-last\"");
            }
            m.output = it->get<std::string>();
        }
        return m;
    }

    std::vector<ModelClass> packages(const json& doc) const {
        only_keys(doc, {"packages"}, "");
        const json& pkgs = member(doc, "packages", "");
        if (!pkgs.is_array()) fail("/packages", "expected an array");
        std::vector<ModelClass> out;
        for (size_t p = 0; p < pkgs.size(); ++p) {
            std::string pptr = "/packages/" + std::to_string(p);
            only_keys(pkgs[p], {"name", "classes"}, pptr);
            std::string pkg = string_member(pkgs[p], "name", pptr);
            const json& classes = member(pkgs[p], "classes", pptr);
            if (!classes.is_array()) fail(pptr + "/classes", "expected an array");
            for (size_t c = 0; c < classes.size(); ++c) {
                std::string cptr = pptr + "/classes/" + std::to_string(c);
                only_keys(classes[c], {"name", "allocatable", "methods"}, cptr);
                ModelClass cls;
                cls.package = pkg;
                cls.name = string_member(classes[c], "name", cptr);
                const json& alloc = member(classes[c], "allocatable", cptr);
                if (!alloc.is_boolean()) fail(cptr + "/allocatable", "expected a boolean");
                cls.allocatable = alloc.get<bool>();
                const json& methods = member(classes[c], "methods", cptr);
                if (!methods.is_array()) fail(cptr + "/methods", "expected an array");
                for (size_t m = 0; m < methods.size(); ++m) {
                    cls.methods.push_back(method(methods[m], cptr + "/methods/" + std::to_string(m)));
                }
                out.push_back(std::move(cls));
            }
        }
        return out;
    }

private:
    std::string path_;
};

std::string module_for_package(const ModelClass& cls) {
    std::string name = cls.package.empty() ? cls.name : cls.package;
    std::replace(name.begin(), name.end(), '/', '.');
    return name;
}

ir::IRFunction build_function(const ModelClass& cls, const ModelMethod& m, const std::string& path) {
    const std::string fname = function_name(cls, m);
    SourceSpan span{path, 1, 1, 1, 1};
    ir::FunctionBuilder b(fname, ir::FunctionKind::Model, cls.package, span);
    b.function().declared_class = cls.qualified();
    b.function().accepts_varargs = m.varargs;
    b.function().accepts_kwargs = m.kwargs;
    std::vector<ir::ValueId> args;
    for (int i = 0; i < m.num_args; ++i) {
        std::string name = i == 0 ? "" : (static_cast<size_t>(i) <= m.params.size() ? m.params[static_cast<size_t>(i) - 1] : "");
        args.push_back(b.add_param(name, span));
    }
    std::map<std::string, ir::ValueId> defs;
    auto resolve = [&](const Operand& o) -> ir::ValueId {
        switch (o.kind) {
            case Operand::Kind::Arg:
                if (o.arg < 0 || o.arg >= m.num_args) throw DanglingReference("arg" + std::to_string(o.arg), fname);
                return args[static_cast<size_t>(o.arg)];
            case Operand::Kind::Def: {
                auto it = defs.find(o.def);
                if (it == defs.end()) throw DanglingReference(o.def, fname);
                return it->second;
            }
            case Operand::Kind::Int: {
                ir::ValueId v = b.new_value(span);
                b.emit(ir::Const{v, o.value}, span);
                return v;
            }
        }
        throw DanglingReference("?", fname);
    };
    auto define = [&](const std::string& name) {
        if (defs.count(name)) throw SchemaError(path, fname, "def '" + name + "' defined twice");
        ir::ValueId v = b.new_value(span, name);
        defs[name] = v;
        return v;
    };
    for (const auto& op : m.body) {
        if (b.terminated()) throw SchemaError(path, fname, "operation after return");
        switch (op.kind) {
            case ModelOp::Kind::New: {
                ir::ValueId v = define(op.def);
                b.emit(ir::New{v, op.class_name, b.next_site(), std::nullopt}, span);
                break;
            }
            case ModelOp::Kind::PutField: {
                ir::ValueId obj = resolve(op.ref);
                ir::ValueId val = resolve(op.value);
                b.emit(ir::PutField{obj, op.field, val}, span);
                break;
            }
            case ModelOp::Kind::GetField: {
                ir::ValueId obj = resolve(op.ref);
                b.emit(ir::GetField{define(op.def), obj, op.field}, span);
                break;
            }
            case ModelOp::Kind::Call: {
                ir::ValueId callee = resolve(op.ref);
                std::vector<ir::ValueId> call_args;
                for (const auto& a : op.args) call_args.push_back(resolve(a));
                b.emit(ir::Invoke{define(op.def), callee, std::move(call_args), {}, b.next_site()}, span);
                break;
            }
            case ModelOp::Kind::Return:
                b.emit(ir::Return{resolve(op.ref)}, span);
                break;
        }
    }
    if (!b.terminated()) {
        ir::ValueId none = b.new_value(span);
        b.emit(ir::Const{none, NoneLiteral{}}, span);
        b.emit(ir::Return{none}, span);
    }
    return b.take();
}

void rebuild(ModelSpec& spec, const std::string& path) {
    spec.functions.clear();
    spec.modules.clear();
    spec.module_classes.clear();
    for (const auto& cls : spec.classes) {
        for (const auto& m : cls.methods) {
            spec.functions.insert_or_assign(function_name(cls, m), build_function(cls, m, path));
            if (m.name == "import") {
                spec.modules[module_for_package(cls)] = function_name(cls, m);
                spec.module_classes[cls.qualified()] = module_for_package(cls);
            }
        }
    }
}

json operand_json(const Operand& o) {
    switch (o.kind) {
        case Operand::Kind::Arg: return "arg" + std::to_string(o.arg);
        case Operand::Kind::Def: return o.def;
        case Operand::Kind::Int: return json{{"int", o.value}};
    }
    return nullptr;
}

}  // namespace

ModelSpec load_model_json(const json& doc, const std::string& path) {
    ModelSpec spec;
    spec.classes = Reader(path).packages(doc);
    std::set<std::string> seen;
    for (const auto& c : spec.classes) {
        if (!seen.insert(c.qualified()).second) throw SchemaError(path, "/packages", "class " + c.qualified() + " defined twice");
    }
    rebuild(spec, path);
    return spec;
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError(path + ": cannot open model file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path, "/", std::string("invalid JSON: ") + e.what());
    }
    return load_model_json(doc, path);
}

void merge(ModelSpec& spec, const ModelSpec& extra) {
    for (const auto& c : extra.classes) {
        auto it = std::find_if(spec.classes.begin(), spec.classes.end(),
                               [&](const ModelClass& x) { return x.qualified() == c.qualified(); });
        if (it != spec.classes.end()) {
            *it = c;
        } else {
            spec.classes.push_back(c);
        }
    }
    rebuild(spec, "<merged>");
}

const ir::IRFunction& import_function(const ModelSpec& spec, const std::string& module) {
    auto it = spec.modules.find(module);
    if (it == spec.modules.end()) throw UnknownModule(module);
    return spec.functions.at(it->second);
}

json to_json(const ModelSpec& spec) {
    json packages = json::array();
    std::map<std::string, size_t> index;
    for (const auto& cls : spec.classes) {
        auto it = index.find(cls.package);
        if (it == index.end()) {
            it = index.emplace(cls.package, packages.size()).first;
            packages.push_back(json{{"name", cls.package}, {"classes", json::array()}});
        }
        json methods = json::array();
        for (const auto& m : cls.methods) {
            json body = json::array();
            for (const auto& op : m.body) {
                switch (op.kind) {
                    case ModelOp::Kind::New:
                        body.push_back(json{{"op", "new"}, {"def", op.def}, {"class", op.class_name}});
                        break;
                    case ModelOp::Kind::PutField:
                        body.push_back(json{{"op", "putfield"},
                                            {"ref", operand_json(op.ref)},
                                            {"field", op.field},
                                            {"value", operand_json(op.value)}});
                        break;
                    case ModelOp::Kind::GetField:
                        body.push_back(
                            json{{"op", "getfield"}, {"ref", operand_json(op.ref)}, {"field", op.field}, {"def", op.def}});
                        break;
                    case ModelOp::Kind::Call: {
                        json args = json::array();
                        for (const auto& a : op.args) args.push_back(operand_json(a));
                        body.push_back(
                            json{{"op", "call"}, {"receiver", operand_json(op.ref)}, {"args", args}, {"def", op.def}});
                        break;
                    }
                    case ModelOp::Kind::Return:
                        body.push_back(json{{"op", "return"}, {"value", operand_json(op.ref)}});
                        break;
                }
            }
            json jm{{"name", m.name},
                    {"numArgs", m.num_args},
                    {"semantics", m.semantics ? json(*m.semantics) : json(nullptr)},
                    {"body", body}};
            if (!m.params.empty()) jm["params"] = m.params;
            if (m.varargs) jm["varargs"] = true;
            if (m.kwargs) jm["kwargs"] = true;
            if (!m.output.empty()) jm["output"] = m.output;
            methods.push_back(std::move(jm));
        }
        packages[it->second]["classes"].push_back(
            json{{"name", cls.name}, {"allocatable", cls.allocatable}, {"methods", methods}});
    }
    return json{{"packages", packages}};
}

}  // namespace tensorlint::model
