#include <gtest/gtest.h>

#include <random>

#include "ctaudit/association.hpp"
#include "ctaudit/dataset_io.hpp"
#include "ctaudit/error.hpp"
#include "oracle.hpp"

using namespace ctaudit;

TEST(NominalCorrelation, ShopsPooledIsExactlyMinusOneEighth) {
  const auto r = nominal_correlation(collapse(embedded_dataset("shops").table));
  EXPECT_EQ(r.value_squared, Rational(1, 64));
  EXPECT_LT(r.det, 0);
  EXPECT_EQ(r.value, -0.125);
}

TEST(NominalCorrelation, AgreesWithFloatingOracle) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    const Table2x2 t = oracle::random_table(rng, 2000);
    const double expect = static_cast<double>(oracle::correlation(to_double(t.a()), to_double(t.b()),
                                                                  to_double(t.c()), to_double(t.d())));
    ASSERT_NEAR(nominal_correlation(t).value, expect, 1e-12);
  }
}

TEST(NominalCorrelation, BoundsTransposeAndRatioProduct) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 2000; ++i) {
    const Table2x2 t = oracle::random_table(rng, i % 2 ? 5 : 5000);
    const auto r = nominal_correlation(t);
    ASSERT_GE(r.value, -1.0);
    ASSERT_LE(r.value, 1.0);
    const auto u = nominal_correlation(t.transposed());
    ASSERT_EQ(u.value_squared, r.value_squared);
    ASSERT_EQ(u.det, r.det);
    ASSERT_EQ(r.value_squared, r.exact_row_ratio * r.exact_col_ratio);
  }
}

TEST(NominalCorrelation, ZeroMarginGivesZero) {
  const auto r = nominal_correlation(Table2x2(0, 0, 3, 4));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.value_squared, 0);
}

TEST(FlattenedVolume, GramDeterminants) {
  EXPECT_EQ(flattened_gram_determinant(embedded_dataset("original").table), 161871452);
  EXPECT_EQ(flattened_gram_determinant(embedded_dataset("derksen").table), 88223167);
  EXPECT_NEAR(flattened_volume_ratio(embedded_dataset("original").table), 0.27605, 1e-5);
  EXPECT_THROW(flattened_volume_ratio(StratifiedTable("one", {{"A", Table2x2(1, 2, 3, 4)}})), ValidationError);
}

TEST(OddsRatio, KindsAndValues) {
  EXPECT_EQ(odds_ratio(Table2x2(5, 1, 8, 2)).value(), Rational(5, 4));
  EXPECT_EQ(odds_ratio(Table2x2(5, 0, 8, 2)).kind(), OddsRatio::Kind::Infinite);
  EXPECT_EQ(odds_ratio(Table2x2(0, 0, 8, 2)).kind(), OddsRatio::Kind::Undefined);
  EXPECT_EQ(odds_ratio(Table2x2(0, 1, 8, 2)).value(), 0);
  EXPECT_EQ(odds_ratio(Table2x2(5, 1, 8, 2)).to_string(), "5/4");
  EXPECT_EQ(odds_ratio(Table2x2(5, 0, 8, 2)).to_string(), "inf");
}

TEST(OddsRatio, RowAndColumnScalingInvariance) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> scale(1, 9);
  for (int i = 0; i < 2000; ++i) {
    const Table2x2 t = oracle::random_table(rng, 40);
    const int r = scale(rng), c = scale(rng);
    const Table2x2 rows(t.a() * r, t.b() * r, t.c(), t.d());
    const Table2x2 cols(t.a() * c, t.b(), t.c() * c, t.d());
    ASSERT_EQ(odds_ratio(rows), odds_ratio(t));
    ASSERT_EQ(odds_ratio(cols), odds_ratio(t));
  }
}

TEST(RateTable, PerStratumAndPooled) {
  const std::vector<StratifiedTable> ds{embedded_dataset("original").table, embedded_dataset("derksen").table};
  const RateTable t = rate_table(ds);
  EXPECT_EQ(t.entries.size(), 6u);
  EXPECT_EQ(*t.at("original", "RKZ1").suspect.value, 1);
  EXPECT_EQ(*t.at("original", "JKZ").other.value, 0);
  EXPECT_EQ(*t.pooled_for("original").p0.value, Rational(13, 1533));
  EXPECT_EQ(*t.pooled_for("derksen").p1.value, Rational(6, 203));
  EXPECT_FALSE(make_rate(0, 0).value.has_value());
  EXPECT_TRUE(std::isnan(make_rate(0, 0).as_double()));
  EXPECT_THROW(t.at("original", "XYZ"), ValidationError);
}

TEST(DeterminantFigure, IdentityCoincidesWithUnitSquare) {
  const FigureModel f = determinant_figure(Table2x2(1, 0, 0, 1));
  EXPECT_EQ(f.rect_width, 1);
  EXPECT_EQ(f.rect_height, 1);
  EXPECT_EQ(f.parallelogram[0], (Point{0, 0}));
  EXPECT_EQ(f.parallelogram[1], (Point{1, 0}));
  EXPECT_EQ(f.parallelogram[2], (Point{1, 1}));
  EXPECT_EQ(f.parallelogram[3], (Point{0, 1}));
  EXPECT_EQ(f.area_ratio, Rational(1));
}

TEST(DeterminantFigure, OriginalPooledRatio) {
  const FigureModel f = determinant_figure(collapse(embedded_dataset("original").table));
  EXPECT_EQ(f.area_ratio, Rational(18849, 46089));
  EXPECT_EQ(f.parallelogram_area, 18849);
  EXPECT_FALSE(determinant_figure(Table2x2(0, 0, 0, 5)).area_ratio.has_value());
}
