#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctaudit/rational.hpp"
#include "ctaudit/table.hpp"

namespace ctaudit {

/// Determinant-based association of a 2x2 table.
///
/// With det = ad - bc, the row picture compares the parallelogram spanned by
/// the row vectors (a,b) and (c,d) with the col1 x col2 rectangle; the
/// column picture does the same for the transpose. The correlation is the
/// signed geometric mean of the two area ratios,
///
///     value = det / sqrt(row1 * row2 * col1 * col2).
///
/// A zero margin gives value 0 and zero ratios.
struct NominalCorrelationResult {
  double value = 0.0;
  BigInt det;
  double row_picture_ratio = 0.0;  // det / (col1 * col2)
  double col_picture_ratio = 0.0;  // det / (row1 * row2)
  Rational value_squared;          // det^2 / (row1 row2 col1 col2)
  Rational exact_row_ratio;
  Rational exact_col_ratio;
};

NominalCorrelationResult nominal_correlation(const Table2x2& t);

struct StratumCorrelation {
  std::string label;
  NominalCorrelationResult result;
};

std::vector<StratumCorrelation> stratum_correlations(const StratifiedTable& s);

/// Gram determinant of the two columns of the stacked (2 * strata) x 2
/// matrix, i.e. |x|^2 |y|^2 - (x.y)^2.
BigInt flattened_gram_determinant(const StratifiedTable& s);

/// sqrt(Gram determinant) / (col1 sum * col2 sum), in [0,1]. A composite
/// of this library, not a published multiway measure. Zero column sum
/// gives 0. Throws ValidationError for fewer than two strata.
double flattened_volume_ratio(const StratifiedTable& s);

/// Exact (a d) / (b c) with explicit markers for the degenerate cases.
class OddsRatio {
public:
  enum class Kind { Finite, Infinite, Undefined };

  static OddsRatio of(const Table2x2& t);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  /// Meaningful only for Kind::Finite.
  const Rational& value() const { return value_; }
  /// "5/4", "inf" or "undefined".
  std::string to_string() const;
  bool operator==(const OddsRatio&) const = default;

private:
  OddsRatio(Kind kind, Rational value) : kind_(kind), value_(std::move(value)) {}

  Kind kind_;
  Rational value_;
};

inline OddsRatio odds_ratio(const Table2x2& t) { return OddsRatio::of(t); }

/// incidents / shifts; undefined (nullopt) for zero shifts.
struct Rate {
  Count incidents;
  Count shifts;
  std::optional<Rational> value;

  /// NaN when undefined.
  double as_double() const;
};

Rate make_rate(const Count& incidents, const Count& shifts);

struct RateEntry {
  std::string dataset;
  std::string stratum;
  Rate suspect;  // row 1: a / (a + b)
  Rate other;    // row 2: c / (c + d)
};

struct PooledRates {
  std::string dataset;
  Rate p1;  // suspect, over all strata
  Rate p0;  // others, over all strata
};

struct RateTable {
  std::vector<RateEntry> entries;  // dataset order, then stratum order
  std::vector<PooledRates> pooled;

  /// Throws ValidationError when absent.
  const RateEntry& at(const std::string& dataset, const std::string& stratum) const;
  const PooledRates& pooled_for(const std::string& dataset) const;
};

RateTable rate_table(std::span<const StratifiedTable> datasets);

struct Point {
  BigInt x;
  BigInt y;

  bool operator==(const Point&) const = default;
};

/// Row-vector picture of a 2x2 table: v1 = (a,b), v2 = (c,d), the
/// parallelogram they span, and the [0,col1] x [0,col2] rectangle.
struct FigureModel {
  Point v1;
  Point v2;
  std::array<Point, 4> parallelogram;  // origin, v1, v1 + v2, v2
  BigInt rect_width;                   // col1 sum
  BigInt rect_height;                  // col2 sum
  BigInt parallelogram_area;           // |det|
  BigInt rectangle_area;
  std::optional<Rational> area_ratio;  // nullopt for a zero-area rectangle
  NominalCorrelationResult correlation;
  LabelPair row_labels;
  LabelPair col_labels;
};

FigureModel determinant_figure(const Table2x2& t);

}  // namespace ctaudit
