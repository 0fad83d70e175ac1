// Random generators for types and shapes.
#pragma once

#include <random>

#include "tensorlint/types.hpp"

namespace oracle {

struct TensorShapeLimits {
    int max_factors = 6;
    int max_size = 12;
    bool allow_syms = true;
    bool allow_labels = true;
};

tensorlint::types::Factor random_factor(std::mt19937_64& rng, const TensorShapeLimits& limits);

/// Tensor whose dims hold at most `limits.max_factors` factors in total.
tensorlint::types::TensorType random_tensor(std::mt19937_64& rng, const TensorShapeLimits& limits);

/// Any type, nesting up to `depth`.
tensorlint::types::TypePtr random_type(std::mt19937_64& rng, int depth);

/// Record with nested records, up to `depth`.
tensorlint::types::TypePtr random_record(std::mt19937_64& rng, int depth);

/// Same type with the fields of every record shuffled.
tensorlint::types::TypePtr permute_fields(const tensorlint::types::TypePtr& t, std::mt19937_64& rng);

}  // namespace oracle
