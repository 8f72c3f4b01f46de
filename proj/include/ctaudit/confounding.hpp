#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctaudit/association.hpp"
#include "ctaudit/table.hpp"

namespace ctaudit {

/// Position of an odds ratio relative to 1. An infinite ratio is Above.
enum class Direction { Above, Equal, Below, Undefined };

Direction direction(const OddsRatio& odds);
std::string to_string(Direction d);

struct StratumOddsRatio {
  std::string label;
  OddsRatio odds_ratio;
  Direction direction;
};

/// Simpson reversal test on exact odds ratios.
///
/// `paradox` holds iff every stratum with a defined odds ratio lies strictly
/// on one side of 1 and the pooled ratio lies strictly on the other. Strata
/// with undefined ratios are left out of that vote but still reported.
struct SimpsonVerdict {
  std::vector<StratumOddsRatio> strata;
  OddsRatio pooled;
  Direction pooled_direction;
  bool paradox = false;
  std::vector<std::string> notes;
};

/// Throws ValidationError for fewer than two strata.
SimpsonVerdict simpson_check(const StratifiedTable& s);

struct CollapseComparison {
  std::vector<StratumCorrelation> stratified;
  NominalCorrelationResult pooled;
  /// Present with two or more strata.
  std::optional<double> flattened_volume_ratio;
  /// pooled - stratum, per stratum.
  std::vector<double> stratum_deltas;
  /// pooled - flattened volume ratio.
  std::optional<double> flattened_delta;
};

CollapseComparison collapse_comparison(const StratifiedTable& s);

}  // namespace ctaudit
