#include "ctaudit/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctaudit/error.hpp"

namespace ctaudit {

namespace {

double signed_sqrt(const BigInt& sign_source, const Rational& square) {
  const double magnitude = std::sqrt(to_double(square));
  return sign_source < 0 ? -magnitude : magnitude;
}

}  // namespace

NominalCorrelationResult nominal_correlation(const Table2x2& t) {
  const Margins m = t.margins();
  NominalCorrelationResult out;
  out.det = t.a() * t.d() - t.b() * t.c();

  const BigInt col_product = m.col1 * m.col2;
  const BigInt row_product = m.row1 * m.row2;
  if (col_product == 0 || row_product == 0) {
    // No variation along one axis; det is 0 as well.
    return out;
  }
  out.exact_row_ratio = Rational(out.det, col_product);
  out.exact_col_ratio = Rational(out.det, row_product);
  out.value_squared = out.exact_row_ratio * out.exact_col_ratio;
  out.row_picture_ratio = to_double(out.exact_row_ratio);
  out.col_picture_ratio = to_double(out.exact_col_ratio);
  out.value = signed_sqrt(out.det, out.value_squared);
  return out;
}

std::vector<StratumCorrelation> stratum_correlations(const StratifiedTable& s) {
  std::vector<StratumCorrelation> out;
  out.reserve(s.size());
  for (const auto& stratum : s.strata()) out.push_back({stratum.label, nominal_correlation(stratum.table)});
  return out;
}

BigInt flattened_gram_determinant(const StratifiedTable& s) {
  BigInt xx = 0;
  BigInt yy = 0;
  BigInt xy = 0;
  for (const auto& stratum : s.strata()) {
    const Table2x2& t = stratum.table;
    for (int row = 0; row < 2; ++row) {
      const Count& x = t.cell(row, 0);
      const Count& y = t.cell(row, 1);
      xx += x * x;
      yy += y * y;
      xy += x * y;
    }
  }
  return xx * yy - xy * xy;
}

double flattened_volume_ratio(const StratifiedTable& s) {
  if (s.size() < 2) {
    throw ValidationError("flattened volume ratio needs at least two strata, dataset '" + s.name() + "' has " +
                          std::to_string(s.size()));
  }
  const Margins m = collapse(s).margins();
  const BigInt denominator = m.col1 * m.col2;
  if (denominator == 0) return 0.0;
  return std::sqrt(to_double(Rational(flattened_gram_determinant(s), denominator * denominator)));
}

OddsRatio OddsRatio::of(const Table2x2& t) {
  const BigInt numerator = t.a() * t.d();
  const BigInt denominator = t.b() * t.c();
  if (denominator != 0) return OddsRatio(Kind::Finite, Rational(numerator, denominator));
  if (numerator != 0) return OddsRatio(Kind::Infinite, 0);
  return OddsRatio(Kind::Undefined, 0);
}

std::string OddsRatio::to_string() const {
  switch (kind_) {
    case Kind::Finite:
      return to_fraction_string(value_);
    case Kind::Infinite:
      return "inf";
    case Kind::Undefined:
      break;
  }
  return "undefined";
}

double Rate::as_double() const { return value ? to_double(*value) : std::numeric_limits<double>::quiet_NaN(); }

Rate make_rate(const Count& incidents, const Count& shifts) {
  Rate r{incidents, shifts, std::nullopt};
  if (shifts != 0) r.value = Rational(incidents, shifts);
  return r;
}

const RateEntry& RateTable::at(const std::string& dataset, const std::string& stratum) const {
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const RateEntry& e) { return e.dataset == dataset && e.stratum == stratum; });
  if (it == entries.end()) throw ValidationError("rate table has no entry " + dataset + "/" + stratum);
  return *it;
}

const PooledRates& RateTable::pooled_for(const std::string& dataset) const {
  const auto it = std::find_if(pooled.begin(), pooled.end(), [&](const PooledRates& p) { return p.dataset == dataset; });
  if (it == pooled.end()) throw ValidationError("rate table has no dataset " + dataset);
  return *it;
}

RateTable rate_table(std::span<const StratifiedTable> datasets) {
  RateTable out;
  for (const auto& s : datasets) {
    for (const auto& stratum : s.strata()) {
      const Table2x2& t = stratum.table;
      const Margins m = t.margins();
      out.entries.push_back({s.name(), stratum.label, make_rate(t.a(), m.row1), make_rate(t.c(), m.row2)});
    }
    const Table2x2 pooled = collapse(s);
    const Margins m = pooled.margins();
    out.pooled.push_back({s.name(), make_rate(pooled.a(), m.row1), make_rate(pooled.c(), m.row2)});
  }
  return out;
}

FigureModel determinant_figure(const Table2x2& t) {
  const Margins m = t.margins();
  FigureModel f;
  f.v1 = {t.a(), t.b()};
  f.v2 = {t.c(), t.d()};
  f.parallelogram = {Point{0, 0}, f.v1, Point{t.a() + t.c(), t.b() + t.d()}, f.v2};
  f.rect_width = m.col1;
  f.rect_height = m.col2;
  f.correlation = nominal_correlation(t);
  f.parallelogram_area = boost::multiprecision::abs(f.correlation.det);
  f.rectangle_area = m.col1 * m.col2;
  if (f.rectangle_area != 0) f.area_ratio = Rational(f.parallelogram_area, f.rectangle_area);
  f.row_labels = t.row_labels();
  f.col_labels = t.col_labels();
  return f;
}

}  // namespace ctaudit
