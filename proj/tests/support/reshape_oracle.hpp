// Brute-force reference for reshape: enumerates every way of splitting the
// unlabeled numeric factors and every consecutive grouping of the resulting
// factor sequence against the target entries.
#pragma once

#include <optional>
#include <set>
#include <string>

#include "tensorlint/types.hpp"

namespace oracle {

struct ReshapeVerdict {
    /// Canonical spellings of every legal result; empty when rejected.
    std::set<std::string> results;
    /// Set when rejected.
    std::optional<tensorlint::types::ShapeErrorKind> error;
};

ReshapeVerdict reshape(const tensorlint::types::TensorType& src, const tensorlint::types::Shape& shape);

}  // namespace oracle
