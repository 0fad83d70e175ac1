#include <gtest/gtest.h>

#include "tensorlint/types.hpp"

using namespace tensorlint::types;

namespace {

TensorType tensor(const std::string& text) { return *as_tensor(*parse_type(text)); }

std::string text(const TensorType& t) { return to_string(make_tensor(t)); }

CheckConfig strict() { return CheckConfig{}; }

TEST(TypeSyntax, PrintsWhatItParses) {
    for (const char* s : {"tensor[batch, y(28)*x(28)] of channel", "{images: tensor[10] of label}",
                          "(x: tensor[3] of num) -> top", "channel"}) {
        EXPECT_EQ(to_string(parse_type(s)), s);
    }
}

TEST(TypeSyntax, RejectsMalformed) {
    EXPECT_THROW(parse_type("tensor[batch"), TypeSyntaxError);
    EXPECT_THROW(parse_type("{a: channel, a: num}"), TypeSyntaxError);
    EXPECT_THROW(parse_type("tensor[] of channel"), TypeSyntaxError);
}

TEST(TypeEquality, NestedTensorEqualsFlat) {
    EXPECT_TRUE(type_equal(parse_type("tensor[batch] of tensor[y(28), x(28)] of channel"),
                           parse_type("tensor[batch, y(28), x(28)] of channel")));
    EXPECT_FALSE(type_equal(parse_type("tensor[batch, y(28)*x(28)] of channel"),
                            parse_type("tensor[batch, x(28)*y(28)] of channel")));
}

TEST(TypeEquality, RecordFieldOrderIgnored) {
    EXPECT_TRUE(type_equal(parse_type("{a: channel, b: num}"), parse_type("{b: num, a: channel}")));
    EXPECT_EQ(canonical(parse_type("{a: channel, b: num}")), canonical(parse_type("{b: num, a: channel}")));
}

TEST(Dims, SizesAndLabels) {
    auto t = tensor("tensor[batch, y(28)*x(28), 3] of channel");
    EXPECT_FALSE(dim_size(t.dims[0]).has_value());
    EXPECT_EQ(dim_size(t.dims[1]), 784);
    EXPECT_EQ(dim_size(t.dims[2]), 3);
    EXPECT_EQ(dim_label(t.dims[0]), "batch");
}

TEST(Reshape, SplitsCombinedDimensionByLabels) {
    auto out = reshape_apply(tensor("tensor[batch, y(28)*x(28)] of channel"), {-1, 28, 28, 1});
    ASSERT_TRUE(out.ok()) << out.error->message;
    EXPECT_EQ(text(*out.value), "tensor[batch, y(28), x(28), 1] of channel");
}

TEST(Reshape, WrongFactorizationIsRejected) {
    auto out = reshape_apply(tensor("tensor[batch, y(28)*x(28)] of channel"), {-1, 56, 14, 1});
    ASSERT_FALSE(out.ok());
    EXPECT_EQ(out.error->kind, ShapeErrorKind::InvalidFactorization);
}

TEST(Reshape, WrongElementCountIsRejected) {
    auto out = reshape_apply(tensor("tensor[batch, y(28)*x(28)] of channel"), {-1, 28, 27, 1});
    ASSERT_FALSE(out.ok());
    EXPECT_EQ(out.error->kind, ShapeErrorKind::SizeMismatch);
}

TEST(Reshape, WildcardRules) {
    auto src = tensor("tensor[batch, 12] of num");
    auto two = reshape_apply(src, {-1, -1});
    ASSERT_FALSE(two.ok());
    EXPECT_EQ(two.error->kind, ShapeErrorKind::MultipleWildcards);
    auto none = reshape_apply(src, {3, 4});
    ASSERT_FALSE(none.ok());
    EXPECT_EQ(none.error->kind, ShapeErrorKind::WildcardUnresolvable);
    auto known = reshape_apply(tensor("tensor[6, 4] of num"), {-1, 8});
    ASSERT_TRUE(known.ok());
    EXPECT_EQ(text(*known.value), "tensor[3, 2*4] of num");
}

TEST(Reshape, MergesToCombinedDimension) {
    auto out = reshape_apply(tensor("tensor[batch, y(7), x(7), 4] of channel"), {-1, 196});
    ASSERT_TRUE(out.ok()) << out.error->message;
    EXPECT_EQ(text(*out.value), "tensor[batch, y(7)*x(7)*4] of channel");
}

TEST(Conv2d, KeepsInputTypeWhenValid) {
    auto in = tensor("tensor[batch, y(28), x(28), 1] of channel");
    auto out = conv2d_check(in, Count{32, ""}, strict());
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(text(*out.value), text(in));
}

TEST(Conv2d, FiltersLastReplacesChannels) {
    auto cfg = strict();
    cfg.filters_last = true;
    auto out = conv2d_check(tensor("tensor[batch, y(28), x(28), 1] of channel"), Count{32, ""}, cfg);
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(text(*out.value), "tensor[batch, y(28), x(28), 32] of channel");
}

TEST(Conv2d, RankLabelAndElementErrors) {
    auto rank = conv2d_check(tensor("tensor[batch, y(28)*x(28)] of channel"), Count{32, ""}, strict());
    ASSERT_FALSE(rank.ok());
    EXPECT_EQ(rank.error->kind, ShapeErrorKind::RankError);

    auto swapped = tensor("tensor[batch, x(28), y(28), 1] of channel");
    auto label = conv2d_check(swapped, Count{32, ""}, strict());
    ASSERT_FALSE(label.ok());
    EXPECT_EQ(label.error->kind, ShapeErrorKind::LabelError);
    CheckConfig loose;
    loose.strict_hw_order = false;
    EXPECT_TRUE(conv2d_check(swapped, Count{32, ""}, loose).ok());

    auto element = conv2d_check(tensor("tensor[batch, y(28), x(28), 1] of label"), Count{32, ""}, strict());
    ASSERT_FALSE(element.ok());
    EXPECT_EQ(element.error->kind, ShapeErrorKind::ElementNotNumeric);
}

TEST(Conv3d, NeedsRankFive) {
    EXPECT_TRUE(conv3d_check(tensor("tensor[batch, z(16), y(16), x(16), 1] of pixel"), Count{8, ""}, strict()).ok());
    auto out = conv3d_check(tensor("tensor[batch, y(16), x(16), 1] of pixel"), Count{8, ""}, strict());
    ASSERT_FALSE(out.ok());
    EXPECT_EQ(out.error->kind, ShapeErrorKind::RankError);
}

TEST(Pool, HalvesSpatialDimensions) {
    auto out = pool2d_apply(tensor("tensor[batch, y(28), x(28), 1] of channel"), 2, 2, strict());
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(text(*out.value), "tensor[batch, y(14), x(14), 1] of channel");
    EXPECT_TRUE(out.warnings.empty());
}

TEST(Pool, RemainderWarns) {
    auto out = pool2d_apply(tensor("tensor[batch, y(7), x(7), 1] of channel"), 2, 2, strict());
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(text(*out.value), "tensor[batch, y(3), x(3), 1] of channel");
    EXPECT_FALSE(out.warnings.empty());
}

TEST(Flatten, CombinesAllButBatch) {
    auto out = flatten_apply(tensor("tensor[batch, y(7), x(7), 1] of channel"));
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(text(*out.value), "tensor[batch, y(7)*x(7)] of channel");
}

TEST(Dense, ReplacesLastDimension) {
    auto in = tensor("tensor[batch, y(7)*x(7)] of channel");
    EXPECT_EQ(text(*dense_apply(in, Count{1024, ""}).value), "tensor[batch, 1024] of channel");
    EXPECT_EQ(text(*dense_apply(in, Count{std::nullopt, "n_classes"}).value),
              "tensor[batch, n_classes] of channel");
}

TEST(Placeholder, UnknownEntriesGetFreshLabels) {
    int fresh = 1;
    auto out = placeholder_type({std::nullopt, 784}, fresh);
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(fresh, 2);
    EXPECT_EQ(out.value->dims.size(), 2u);
    EXPECT_FALSE(dim_size(out.value->dims[0]).has_value());
    EXPECT_EQ(dim_size(out.value->dims[1]), 784);
    auto zero = placeholder_type({}, fresh);
    ASSERT_FALSE(zero.ok());
    EXPECT_EQ(zero.error->kind, ShapeErrorKind::PlaceholderRankZero);
}

TEST(Transfers, KnownTags) {
    for (const char* tag : {"reshape", "conv2d", "conv3d", "placeholder", "flatten", "dense", "max_pooling2d"})
        EXPECT_TRUE(has_transfer(tag)) << tag;
    EXPECT_FALSE(has_transfer("softmax"));
}

}  // namespace
