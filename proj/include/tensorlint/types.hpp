// Labeled-dimension tensor types and the shape rules of the modeled APIs.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tensorlint/ir.hpp"

namespace tensorlint::types {

/// A symbolic dimension of unknown size, e.g. `batch`.
struct Sym {
    std::string label;
    bool operator==(const Sym&) const = default;
};
/// An unlabeled dimension of known size.
struct Num {
    std::int64_t n = 0;
    bool operator==(const Num&) const = default;
};
/// A labeled dimension of known size, e.g. `y(28)`.
struct Labeled {
    std::string label;
    std::int64_t n = 0;
    bool operator==(const Labeled&) const = default;
};

using Factor = std::variant<Sym, Num, Labeled>;

/// A dimension is an ordered product of factors; one factor is a plain
/// dimension, two or more form a combined dimension such as y(28)*x(28).
struct Dim {
    std::vector<Factor> factors;

    Dim() = default;
    Dim(Factor f) : factors{std::move(f)} {}
    explicit Dim(std::vector<Factor> fs) : factors(std::move(fs)) {}

    bool is_product() const { return factors.size() > 1; }
    bool operator==(const Dim&) const = default;
};

struct PyType;
using TypePtr = std::shared_ptr<const PyType>;

struct RecordType {
    std::vector<std::pair<std::string, TypePtr>> fields;
};
struct FunctionType {
    std::vector<std::pair<std::string, TypePtr>> params;
    TypePtr result;
};
struct TensorType {
    std::vector<Dim> dims;
    TypePtr element;
};
struct LabelType {
    std::string label;
};
struct TopType {};

struct PyType {
    std::variant<RecordType, FunctionType, TensorType, LabelType, TopType> v;
};

TypePtr make_top();
TypePtr make_label(std::string label);
TypePtr make_tensor(std::vector<Dim> dims, TypePtr element);
TypePtr make_tensor(TensorType t);
TypePtr make_record(std::vector<std::pair<std::string, TypePtr>> fields);
TypePtr make_function(std::vector<std::pair<std::string, TypePtr>> params, TypePtr result);

bool is_top(const PyType& t);
const TensorType* as_tensor(const PyType& t);
const RecordType* as_record(const PyType& t);

/// Field of a record type, or nullptr.
TypePtr record_field(const PyType& t, const std::string& name);

class TypeSyntaxError : public std::runtime_error {
public:
    TypeSyntaxError(size_t offset, const std::string& message)
        : std::runtime_error("offset " + std::to_string(offset) + ": " + message), offset_(offset) {}
    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

/// Parses the annotation syntax. Labels starting with '?' are reserved for
/// generated placeholder dimensions and only accepted when `allow_reserved`.
TypePtr parse_type(std::string_view text, bool allow_reserved = false);

std::string to_string(const Factor& f);
std::string to_string(const Dim& d);
std::string to_string(const PyType& t);
inline std::string to_string(const TypePtr& t) { return to_string(*t); }

/// Flattens nested tensors, sorts record fields and drops unlabeled size-1
/// factors from combined dimensions.
TypePtr normalize(const TypePtr& t);

/// Canonical text: to_string(normalize(t)). Equal keys mean equal types.
std::string canonical(const TypePtr& t);

bool type_equal(const TypePtr& a, const TypePtr& b);

std::optional<std::int64_t> factor_size(const Factor& f);
std::optional<std::int64_t> dim_size(const Dim& d);

/// Label carried by a plain dimension, if any.
std::optional<std::string> dim_label(const Dim& d);

// ---------------------------------------------------------------------------
// API shape rules

enum class ShapeErrorKind {
    SizeMismatch,
    InvalidFactorization,
    MultipleWildcards,
    WildcardUnresolvable,
    RankError,
    LabelError,
    ElementNotNumeric,
    PlaceholderRankZero,
};

const char* to_string(ShapeErrorKind kind);

struct ShapeError {
    ShapeErrorKind kind;
    std::string message;
    std::int64_t got = 0;   // sizes or ranks
    std::int64_t want = 0;
    int position = 0;       // 1-based dimension or target index
    std::string label;
};

template <typename T>
struct Outcome {
    std::optional<T> value;
    std::optional<ShapeError> error;
    std::vector<std::string> warnings;

    bool ok() const { return value.has_value(); }

    static Outcome success(T v) {
        Outcome o;
        o.value = std::move(v);
        return o;
    }
    static Outcome failure(ShapeError e) {
        Outcome o;
        o.error = std::move(e);
        return o;
    }
};

struct CheckConfig {
    bool strict_hw_order = true;
    std::set<std::string> height{"y", "height", "h"};
    std::set<std::string> width{"x", "width", "w"};
    std::set<std::string> depth{"z", "depth", "d"};
    std::set<std::string> numeric{"channel", "num", "value", "pixel"};
    /// conv output keeps the input type unless this is set, in which case
    /// the last dimension becomes the filter count.
    bool filters_last = false;
};

using Shape = ir::ShapeLiteral;

/// Reshape of `src` to `shape`, where -1 (or None) is the single wildcard.
Outcome<TensorType> reshape_apply(const TensorType& src, const Shape& shape);

/// A count argument (filters, units): known value or the source name of the
/// parameter that supplied it.
struct Count {
    std::optional<std::int64_t> value;
    std::string name;
};

Outcome<TensorType> conv2d_check(const TensorType& input, const Count& filters, const CheckConfig& config);
Outcome<TensorType> conv3d_check(const TensorType& input, const Count& filters, const CheckConfig& config);

/// `next_fresh` numbers the generated labels ?1, ?2, ...; it is advanced once
/// per unknown entry.
Outcome<TensorType> placeholder_type(const Shape& shape, int& next_fresh, const std::string& element = "num");

Outcome<TensorType> pool2d_apply(const TensorType& input, std::optional<std::int64_t> pool,
                                 std::optional<std::int64_t> stride, const CheckConfig& config);
Outcome<TensorType> flatten_apply(const TensorType& input);
Outcome<TensorType> dense_apply(const TensorType& input, const Count& units);

/// True for every semantics tag that has a transfer function.
bool has_transfer(const std::string& tag);

}  // namespace tensorlint::types
