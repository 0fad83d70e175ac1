#include <gtest/gtest.h>

#include <filesystem>

#include "pipeline.hpp"
#include "tensorlint/ir.hpp"
#include "tensorlint/lowering.hpp"
#include "tensorlint/parser.hpp"

using namespace tensorlint;
using namespace tensorlint::ir;

namespace {

std::vector<IRFunction> lower(const std::string& text, const std::string& module = "m") {
    return lower_module(*parse_module(text, module + ".py"), module);
}

const IRFunction& by_name(const std::vector<IRFunction>& fns, const std::string& name) {
    for (const auto& f : fns)
        if (f.name == name) return f;
    throw std::out_of_range(name);
}

TEST(Lowering, JoinGetsPhiPerPredecessor) {
    auto fns = lower("x = f()\nif x:\n    y = x.a\nelse:\n    y = x.b\nz = y\n");
    const auto& init = fns.front();
    EXPECT_EQ(init.kind, FunctionKind::ModuleInit);
    EXPECT_EQ(init.name, module_init_name("m"));
    int phis = 0;
    for (const auto& b : init.blocks)
        for (const auto& inst : b.instructions)
            if (auto* phi = inst.as<Phi>()) {
                ++phis;
                EXPECT_EQ(phi->uses.size(), b.preds.size());
                EXPECT_EQ(b.preds.size(), 2u);
            }
    EXPECT_EQ(phis, 1);
    EXPECT_TRUE(validate(init).empty());
}

TEST(Lowering, ListOfIntsCarriesShape) {
    auto fns = lower("s = [-1, 28, None]\n");
    std::optional<ShapeLiteral> shape;
    fns.front().for_each_instruction([&](const BasicBlock&, const Instruction& i) {
        if (auto* n = i.as<New>(); n && n->class_token == "list") shape = n->shape;
    });
    ASSERT_TRUE(shape.has_value());
    EXPECT_EQ(*shape, (ShapeLiteral{-1, 28, std::nullopt}));
}

TEST(Lowering, TupleLiteralHasNoShape) {
    auto fns = lower("s = (1, 2)\n");
    fns.front().for_each_instruction([&](const BasicBlock&, const Instruction& i) {
        if (auto* n = i.as<New>()) EXPECT_FALSE(n->shape.has_value()) << n->class_token;
    });
}

TEST(Lowering, ClassGetsConstructorWithTrampolines) {
    auto fns = lower("class A:\n    def m(self, v):\n        self.v = v\na = A()\na.m(3)\n", "c");
    const auto& ctor = by_name(fns, constructor_name("c.A"));
    EXPECT_EQ(ctor.kind, FunctionKind::Constructor);
    EXPECT_EQ(ctor.declared_class, "c.A");
    std::vector<std::string> tokens;
    ctor.for_each_instruction([&](const BasicBlock&, const Instruction& i) {
        if (auto* n = i.as<New>()) tokens.push_back(n->class_token);
    });
    EXPECT_EQ(tokens, (std::vector<std::string>{"instance:c.A", "trampoline:c.A.m"}));

    const auto& m = by_name(fns, "c.A.m");
    EXPECT_EQ(m.kind, FunctionKind::Method);
    ASSERT_EQ(m.params.size(), 3u);
    EXPECT_EQ(m.params[1].name, "self");
    EXPECT_EQ(m.params[2].name, "v");
}

TEST(Lowering, ModuleBindingsAreLexicalWrites) {
    auto fns = lower("a = 1\ndef f():\n    return a\n");
    std::set<std::string> writes, reads;
    for (const auto& f : fns)
        f.for_each_instruction([&](const BasicBlock&, const Instruction& i) {
            if (auto* w = i.as<LexicalWrite>()) writes.insert(w->name);
            if (auto* r = i.as<LexicalRead>()) reads.insert(r->name);
        });
    EXPECT_EQ(writes, (std::set<std::string>{"a", "f"}));
    EXPECT_EQ(reads, (std::set<std::string>{"a"}));
}

TEST(Lowering, CallSitesAreUniquePerFunction) {
    auto fns = lower("def f(x):\n    return g(x) + g(h(x))\n");
    const auto& f = by_name(fns, "m.f");
    std::set<SiteId> sites;
    int invokes = 0;
    f.for_each_instruction([&](const BasicBlock&, const Instruction& i) {
        if (auto* c = i.as<Invoke>()) {
            ++invokes;
            sites.insert(c->site);
        }
    });
    EXPECT_EQ(invokes, 3);
    EXPECT_EQ(sites.size(), 3u);
}

TEST(Validate, CorpusLowersToValidSsa) {
    namespace fs = std::filesystem;
    for (const auto& entry : fs::recursive_directory_iterator(oracle::corpus_path(""))) {
        if (entry.path().extension() != ".py") continue;
        for (const auto& f : oracle::lower_file(entry.path().string())) {
            auto problems = validate(*f);
            EXPECT_TRUE(problems.empty()) << f->name << ": " << problems.front().message;
        }
    }
}

TEST(Validate, ReportsDoubleDefinition) {
    FunctionBuilder b("m.bad", FunctionKind::Function, "m", SourceSpan{});
    b.add_param("<callee>", SourceSpan{});
    auto v = b.new_value(SourceSpan{});
    b.emit(Const{v, std::int64_t{1}}, SourceSpan{});
    b.emit(Const{v, std::int64_t{2}}, SourceSpan{});
    b.emit(Return{v}, SourceSpan{});
    EXPECT_FALSE(validate(b.take()).empty());
}

TEST(Validate, ReportsUnterminatedBlock) {
    FunctionBuilder b("m.bad", FunctionKind::Function, "m", SourceSpan{});
    b.add_param("<callee>", SourceSpan{});
    auto v = b.new_value(SourceSpan{});
    b.emit(Const{v, std::int64_t{1}}, SourceSpan{});
    EXPECT_FALSE(validate(b.take()).empty());
}

TEST(PrettyPrint, IsDeterministic) {
    auto a = lower("x = [1, 2]\ny = x[0]\n");
    auto b = lower("x = [1, 2]\ny = x[0]\n");
    EXPECT_EQ(pretty_print(a.front()), pretty_print(b.front()));
    EXPECT_NE(pretty_print(a.front()).find("new list [1, 2]"), std::string::npos);
}

}  // namespace
