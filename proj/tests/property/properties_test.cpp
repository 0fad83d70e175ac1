#include <gtest/gtest.h>

#include "properties.hpp"

namespace {

using oracle::PropertyResult;

void expect_holds(const PropertyResult& r) {
    EXPECT_TRUE(r.ok) << r.detail;
    EXPECT_GT(r.cases, 0);
}

TEST(NormalizeProperty, IdempotentAndNestedEqualsFlat) { expect_holds(oracle::normalize_properties(7, 1000)); }

TEST(ReshapeProperty, IdentityAndElementCount) { expect_holds(oracle::reshape_identity_and_conservation(11, 1000)); }

TEST(ReshapeProperty, MatchesOracleOnSamples) { expect_holds(oracle::reshape_matches_oracle_sampled(13, 2000)); }

TEST(ReshapeProperty, MatchesOracleOnSmallDomain) { expect_holds(oracle::reshape_matches_oracle_exhaustive()); }

TEST(RecordProperty, FieldOrderIsIrrelevant) { expect_holds(oracle::record_permutation_invariance(17, 1000)); }

TEST(PropagateProperty, WorklistOrderIsIrrelevant) { expect_holds(oracle::propagate_deterministic(10)); }

TEST(PointsToProperty, CoversConcreteExecution) { expect_holds(oracle::points_to_sound(19, 200)); }

}  // namespace
