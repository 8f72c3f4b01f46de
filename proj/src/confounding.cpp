#include "ctaudit/confounding.hpp"

#include <algorithm>

#include "ctaudit/error.hpp"

namespace ctaudit {

Direction direction(const OddsRatio& odds) {
  switch (odds.kind()) {
    case OddsRatio::Kind::Infinite:
      return Direction::Above;
    case OddsRatio::Kind::Undefined:
      return Direction::Undefined;
    case OddsRatio::Kind::Finite:
      break;
  }
  if (odds.value() > 1) return Direction::Above;
  if (odds.value() < 1) return Direction::Below;
  return Direction::Equal;
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::Above:
      return ">1";
    case Direction::Equal:
      return "=1";
    case Direction::Below:
      return "<1";
    case Direction::Undefined:
      break;
  }
  return "undefined";
}

SimpsonVerdict simpson_check(const StratifiedTable& s) {
  if (s.size() < 2) {
    throw ValidationError("Simpson check needs at least two strata, dataset '" + s.name() + "' has " +
                          std::to_string(s.size()));
  }
  const OddsRatio pooled = odds_ratio(collapse(s));
  SimpsonVerdict v{{}, pooled, direction(pooled), false, {}};

  std::size_t above = 0;
  std::size_t below = 0;
  std::size_t equal = 0;
  std::size_t defined = 0;
  for (const auto& stratum : s.strata()) {
    const OddsRatio odds = odds_ratio(stratum.table);
    const Direction d = direction(odds);
    v.strata.push_back({stratum.label, odds, d});
    switch (d) {
      case Direction::Above:
        ++above;
        break;
      case Direction::Below:
        ++below;
        break;
      case Direction::Equal:
        ++equal;
        break;
      case Direction::Undefined:
        v.notes.push_back("stratum " + stratum.label + ": odds ratio undefined (0/0), excluded");
        continue;
    }
    ++defined;
  }

  if (defined == 0) {
    v.notes.push_back("insufficient data: no stratum has a defined odds ratio");
    return v;
  }
  if (equal > 0 || v.pooled_direction == Direction::Equal) {
    v.notes.push_back("boundary: an odds ratio equals 1 exactly");
  }
  if (v.pooled_direction == Direction::Undefined) {
    v.notes.push_back("pooled odds ratio undefined (0/0)");
  }
  v.paradox = (above == defined && v.pooled_direction == Direction::Below) ||
              (below == defined && v.pooled_direction == Direction::Above);
  return v;
}

CollapseComparison collapse_comparison(const StratifiedTable& s) {
  CollapseComparison out;
  out.stratified = stratum_correlations(s);
  out.pooled = nominal_correlation(collapse(s));
  for (const auto& stratum : out.stratified) out.stratum_deltas.push_back(out.pooled.value - stratum.result.value);
  if (s.size() >= 2) {
    out.flattened_volume_ratio = flattened_volume_ratio(s);
    out.flattened_delta = out.pooled.value - *out.flattened_volume_ratio;
  }
  return out;
}

}  // namespace ctaudit
