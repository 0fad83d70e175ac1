// Property suites run by both the gtest binaries and the acceptance binary.
#pragma once

#include <cstdint>
#include <string>

namespace oracle {

struct PropertyResult {
    bool ok = true;
    int cases = 0;
    /// First counterexample, when !ok.
    std::string detail;
};

/// normalize is idempotent, round-trips through text, and nested tensors
/// equal their flattened form.
PropertyResult normalize_properties(std::uint64_t seed, int n);

/// Reshape to a tensor's own sizes is the identity; any accepted reshape
/// keeps the element count.
PropertyResult reshape_identity_and_conservation(std::uint64_t seed, int n);

/// reshape_apply against the brute-force oracle on random inputs.
PropertyResult reshape_matches_oracle_sampled(std::uint64_t seed, int n);

/// reshape_apply against the oracle on every tensor and target of a small
/// domain.
PropertyResult reshape_matches_oracle_exhaustive();

/// Records compare equal under any field order.
PropertyResult record_permutation_invariance(std::uint64_t seed, int n);

/// Points-to sets, tensor estimates and diagnostics do not depend on the
/// worklist order, over the bundled corpus.
PropertyResult propagate_deterministic(int orders);

/// Every object a variable or field held at run time is in the computed
/// points-to set, over random programs.
PropertyResult points_to_sound(std::uint64_t seed, int programs, int max_statements = 30);

}  // namespace oracle
