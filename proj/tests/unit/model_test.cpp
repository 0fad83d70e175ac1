#include <gtest/gtest.h>

#include "pipeline.hpp"
#include "tensorlint/model.hpp"

using namespace tensorlint;
using namespace tensorlint::model;
using nlohmann::json;

namespace {

json tiny_model() {
    return json::parse(R"({"packages": [{"name": "lib", "classes": [
        {"name": "lib", "allocatable": false, "methods": [
            {"name": "import", "numArgs": 1, "semantics": null, "body": [
                {"op": "new", "def": "m", "class": "lib/lib"},
                {"op": "new", "def": "f", "class": "lib/reshape"},
                {"op": "putfield", "ref": "m", "field": "reshape", "value": "f"},
                {"op": "return", "value": "m"}]}]},
        {"name": "reshape", "allocatable": true, "methods": [
            {"name": "do", "numArgs": 3, "semantics": "reshape", "params": ["tensor", "shape"], "body": [
                {"op": "new", "def": "r", "class": "object"},
                {"op": "return", "value": "r"}]}]}]}]})");
}

TEST(Model, LoadsBundledTensorflow) {
    const auto& spec = oracle::tensorflow_model();
    ASSERT_TRUE(spec.modules.count("tensorflow"));
    const auto* reshape = spec.method("tensorflow/reshape.do");
    ASSERT_NE(reshape, nullptr);
    EXPECT_EQ(reshape->semantics, "reshape");
    EXPECT_EQ(reshape->params, (std::vector<std::string>{"tensor", "shape", "name"}));
    EXPECT_EQ(spec.call_method("tensorflow/layers/conv2d"), "tensorflow/layers/conv2d.do");
}

TEST(Model, MethodsBecomeModelFunctions) {
    auto spec = load_model_json(tiny_model());
    const auto& init = import_function(spec, "lib");
    EXPECT_EQ(init.kind, ir::FunctionKind::Model);
    ASSERT_TRUE(spec.functions.count("lib/reshape.do"));
    const auto& f = spec.functions.at("lib/reshape.do");
    EXPECT_EQ(f.params.size(), 3u);
    EXPECT_TRUE(ir::validate(f).empty());
}

TEST(Model, UnknownModuleThrows) {
    auto spec = load_model_json(tiny_model());
    EXPECT_THROW(import_function(spec, "numpy2"), UnknownModule);
}

TEST(Model, SchemaErrors) {
    EXPECT_THROW(load_model_json(json::parse(R"({"pkgs": []})")), SchemaError);
    auto doc = tiny_model();
    doc["packages"][0]["classes"][1]["methods"][0]["body"][0]["op"] = "explode";
    EXPECT_THROW(load_model_json(doc), SchemaError);
}

TEST(Model, DanglingReferenceIsReported) {
    auto doc = tiny_model();
    doc["packages"][0]["classes"][0]["methods"][0]["body"][2]["value"] = "nowhere";
    EXPECT_THROW(load_model_json(doc), DanglingReference);
}

TEST(Model, UnknownSemanticsTagIsReported) {
    auto doc = tiny_model();
    doc["packages"][0]["classes"][1]["methods"][0]["semantics"] = "teleport";
    EXPECT_THROW(load_model_json(doc), UnknownSemanticsTag);
}

TEST(Model, SerializationRoundTrips) {
    const auto& spec = oracle::tensorflow_model();
    auto once = to_json(spec);
    auto twice = to_json(load_model_json(once));
    EXPECT_EQ(once, twice);
}

TEST(Model, MergeReplacesClasses) {
    auto base = load_model_json(tiny_model());
    auto doc = tiny_model();
    doc["packages"][0]["classes"][1]["methods"][0]["semantics"] = "identity";
    merge(base, load_model_json(doc));
    EXPECT_EQ(base.method("lib/reshape.do")->semantics, "identity");
}

}  // namespace
