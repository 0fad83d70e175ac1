#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pipeline.hpp"
#include "tensorlint/lowering.hpp"
#include "tensorlint/parser.hpp"

using namespace tensorlint;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(Parser, AssignmentCallAndBranch) {
    auto ast = parse_module("x = f(1, k=2)\nif x:\n    y = x.a\nelse:\n    y = [1, None]\nz = y\n", "m.py");
    EXPECT_EQ(dump_tree(*ast),
              "Module[Assign(Name x, Call(Name f, Constant 1, Keyword k(Constant 2))), "
              "If(Name x)[Assign(Name y, Attribute a(Name x))] else[Assign(Name y, ListLit(Constant 1, Constant None))], "
              "Assign(Name z, Name y)]");
}

TEST(Parser, CommentsAndDocstringsAreDropped) {
    auto with = parse_module("# header\ndef f(a):\n    \"\"\"doc\"\"\"\n    return a  # trailing\n", "m.py");
    auto without = parse_module("def f(a):\n    return a\n", "m.py");
    EXPECT_TRUE(equal_ignoring_spans(*with, *without)) << dump_tree(*with);
}

TEST(Parser, SpansPointAtSource) {
    auto ast = parse_module("a = 1\nb = foo(a)\n", "m.py");
    const auto& call = *ast->body[1]->children.back();
    ASSERT_EQ(call.kind, AstKind::Call);
    EXPECT_EQ(call.span.file, "m.py");
    EXPECT_EQ(call.span.line_start, 2);
    EXPECT_EQ(call.span.col_start, 5);
}

TEST(Parser, UnsupportedConstructsAreNamed) {
    try {
        parse_module("x = lambda a: a\n", "e.py");
        FAIL() << "lambda accepted";
    } catch (const UnsupportedConstruct& e) {
        EXPECT_EQ(e.construct(), "lambda");
        EXPECT_EQ(e.span().line_start, 1);
        EXPECT_EQ(e.span().col_start, 5);
    }
    EXPECT_THROW(parse_module("try:\n    pass\nexcept:\n    pass\n", "e.py"), UnsupportedConstruct);
}

TEST(Parser, SyntaxErrorsCarryLocation) {
    try {
        parse_module("def f(:\n", "e.py");
        FAIL() << "accepted";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.span().line_start, 1);
        EXPECT_EQ(e.span().col_start, 7);
    }
    EXPECT_THROW(parse_module("  x = 1\n", "e.py"), SyntaxError);
    EXPECT_THROW(parse_module("x = (1\n", "e.py"), SyntaxError);
}

TEST(Parser, UnparseRoundTripsCorpus) {
    namespace fs = std::filesystem;
    int files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(oracle::corpus_path(""))) {
        if (entry.path().extension() != ".py") continue;
        ++files;
        auto ast = parse_module(read_file(entry.path().string()), entry.path().string());
        auto again = parse_module(unparse(*ast), "again.py");
        EXPECT_TRUE(equal_ignoring_spans(*ast, *again)) << entry.path();
    }
    EXPECT_GE(files, 9);
}

TEST(Parser, CloneIsStructurallyEqual) {
    auto ast = parse_module("class A(B):\n    def m(self, v=3):\n        self.v = v[0] + -v\n", "m.py");
    auto copy = clone(*ast);
    EXPECT_TRUE(equal_ignoring_spans(*ast, *copy));
    copy->body[0]->text = "Z";
    EXPECT_FALSE(equal_ignoring_spans(*ast, *copy));
}

TEST(Lowering, ModuleNameIsFileStem) {
    EXPECT_EQ(module_name_for_path("/a/b/mnist_cnn.py"), "mnist_cnn");
    EXPECT_EQ(module_name_for_path("mnist_deep.py"), "mnist_deep");
}

}  // namespace
