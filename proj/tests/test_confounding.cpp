#include <gtest/gtest.h>

#include "ctaudit/confounding.hpp"
#include "ctaudit/dataset_io.hpp"
#include "ctaudit/error.hpp"

using namespace ctaudit;

TEST(Simpson, ShopsReverses) {
  const auto v = simpson_check(embedded_dataset("shops").table);
  ASSERT_EQ(v.strata.size(), 2u);
  EXPECT_EQ(v.strata[0].odds_ratio.value(), Rational(5, 4));
  EXPECT_EQ(v.strata[1].odds_ratio.value(), Rational(5, 4));
  EXPECT_EQ(v.pooled.value(), Rational(49, 81));
  EXPECT_EQ(v.pooled_direction, Direction::Below);
  EXPECT_TRUE(v.paradox);
}

TEST(Simpson, NoReversalInRosterData) {
  EXPECT_FALSE(simpson_check(embedded_dataset("original").table).paradox);
  EXPECT_FALSE(simpson_check(embedded_dataset("derksen").table).paradox);
}

TEST(Simpson, InfiniteCountsAsAboveAndUndefinedIsNoted) {
  const StratifiedTable s("t", {{"A", Table2x2(3, 0, 1, 1)}, {"B", Table2x2(0, 0, 1, 1)}, {"C", Table2x2(2, 1, 1, 1)}});
  const auto v = simpson_check(s);
  EXPECT_EQ(v.strata[0].direction, Direction::Above);
  EXPECT_EQ(v.strata[1].direction, Direction::Undefined);
  EXPECT_FALSE(v.notes.empty());
}

TEST(Simpson, BoundaryIsNotAReversal) {
  const StratifiedTable s("t", {{"A", Table2x2(2, 1, 1, 1)}, {"B", Table2x2(1, 1, 1, 1)}});
  EXPECT_FALSE(simpson_check(s).paradox);
  EXPECT_EQ(direction(odds_ratio(Table2x2(1, 1, 1, 1))), Direction::Equal);
}

TEST(Simpson, NeedsTwoStrata) {
  EXPECT_THROW(simpson_check(StratifiedTable("t", {{"A", Table2x2(1, 1, 1, 1)}})), ValidationError);
}

TEST(CollapseComparison, DeltasAreConsistent) {
  const auto c = collapse_comparison(embedded_dataset("original").table);
  ASSERT_EQ(c.stratified.size(), 3u);
  ASSERT_TRUE(c.flattened_volume_ratio.has_value());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(c.stratum_deltas[i], c.pooled.value - c.stratified[i].result.value);
  }
  EXPECT_DOUBLE_EQ(*c.flattened_delta, c.pooled.value - *c.flattened_volume_ratio);
  EXPECT_FALSE(collapse_comparison(StratifiedTable("t", {{"A", Table2x2(1, 1, 1, 1)}})).flattened_volume_ratio);
}
