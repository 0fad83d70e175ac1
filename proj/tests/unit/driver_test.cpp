#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pipeline.hpp"
#include "tensorlint/driver.hpp"

using namespace tensorlint;
using namespace tensorlint::driver;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tensorlint");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string corpus(const std::string& f) { return oracle::corpus_path(f); }

TEST(Cli, CleanProgramExitsZero) {
    auto r = cli({corpus("mnist_cnn.py"), "--annotations", corpus("mnist.json")});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(r.out, "");
}

TEST(Cli, ErrorsExitOne) {
    auto r = cli({corpus("mnist_cnn_mutant_28x27.py"), "--annotations", corpus("mnist.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("error ARI001"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("mnist_cnn_mutant_28x27.py:22:"), std::string::npos) << r.out;
}

TEST(Cli, UsageProblemsExitTwo) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({corpus("mnist_cnn.py"), "--format", "xml"}).code, 2);
    EXPECT_EQ(cli({corpus("nope.py")}).code, 2);
    EXPECT_EQ(cli({corpus("mnist_cnn.py"), "--model", "no_such_model"}).code, 2);
    EXPECT_EQ(cli({corpus("mnist_cnn.py"), "--annotations", corpus("mnist_cnn.py")}).code, 2);
    auto dup = cli({corpus("mnist_cnn.py"), corpus("api_matrix/../mnist_cnn.py")});
    EXPECT_EQ(dup.code, 2);
    EXPECT_NE(dup.err.find("duplicate module"), std::string::npos);
}

TEST(Cli, HelpExitsZero) {
    auto r = cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("--dump-types"), std::string::npos);
}

TEST(Cli, HwOrderLooseAcceptsSwappedLabels) {
    EXPECT_EQ(cli({corpus("mnist_cnn.py"), "--annotations", corpus("mnist_swapped.json")}).code, 1);
    EXPECT_EQ(cli({corpus("mnist_cnn.py"), "--annotations", corpus("mnist_swapped.json"), "--hw-order", "loose"}).code,
              0);
}

TEST(Cli, FailOnErrorCountsWarnings) {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "tensorlint_driver_test";
    fs::create_directories(dir);
    auto py = (dir / "unresolved.py").string();
    std::ofstream(py) << "f = 3\nf()\n";
    EXPECT_EQ(cli({py}).code, 0);
    EXPECT_EQ(cli({py, "--fail-on-error"}).code, 1);
}

TEST(Cli, JsonOutput) {
    auto r = cli({corpus("mnist_cnn_mutant_56x14.py"), "--annotations", corpus("mnist.json"), "--format", "json",
                  "--dump-types", "--dump-callgraph"});
    EXPECT_EQ(r.code, 1);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["summary"]["errors"], 1);
    ASSERT_EQ(j["diagnostics"].size(), 1u);
    EXPECT_EQ(j["diagnostics"][0]["code"], "ARI002");
    EXPECT_EQ(j["diagnostics"][0]["line"], 22);
    EXPECT_FALSE(j["types"].empty());
    EXPECT_FALSE(j["callgraph"]["edges"].empty());
}

TEST(Cli, DumpTypesText) {
    auto r = cli({corpus("mnist_cnn.py"), "--annotations", corpus("mnist.json"), "--dump-types"});
    EXPECT_NE(r.out.find("mnist_cnn.py:22: tensor[batch, y(28), x(28), 1] of channel\n"), std::string::npos) << r.out;
}

TEST(Cli, DumpCallgraphText) {
    auto r = cli({corpus("foo.py"), "--dump-callgraph"});
    EXPECT_NE(r.out.find("-> foo.Foo.foo"), std::string::npos) << r.out;
}

TEST(Models, SearchPathPrefersEnvironment) {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "tensorlint_model_dir";
    fs::create_directories(dir);
    fs::copy_file(fs::path(TENSORLINT_BUNDLED_MODEL_DIR) / "tensorflow.json", dir / "custom.json",
                  fs::copy_options::overwrite_existing);
    ::setenv("TENSORLINT_MODEL_DIR", dir.string().c_str(), 1);
    auto found = resolve_model("custom");
    ::unsetenv("TENSORLINT_MODEL_DIR");
    ASSERT_TRUE(found.has_value());
    EXPECT_EQ(*found, (dir / "custom.json").string());
    EXPECT_TRUE(resolve_model("tensorflow").has_value());
    EXPECT_FALSE(resolve_model("custom").has_value());
}

TEST(Models, ExitCodes) {
    EXPECT_EQ(exit_code_for({0, 0}, false), 0);
    EXPECT_EQ(exit_code_for({0, 2}, false), 0);
    EXPECT_EQ(exit_code_for({0, 2}, true), 1);
    EXPECT_EQ(exit_code_for({1, 0}, false), 1);
}

}  // namespace
