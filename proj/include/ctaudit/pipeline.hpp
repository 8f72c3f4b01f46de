#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctaudit/association.hpp"
#include "ctaudit/confounding.hpp"
#include "ctaudit/dataset_io.hpp"
#include "ctaudit/exact_dist.hpp"

namespace ctaudit {

/// Stratified multiplies per-stratum tails ("Not summed"); Collapsed uses
/// the tail of the pooled table ("Summed").
enum class PipelineMode { Stratified, Collapsed };

std::string to_string(PipelineMode mode);
/// "Not summed" / "Summed".
std::string overview_label(PipelineMode mode);
/// Accepts "stratified" or "collapsed"; throws InputError otherwise.
PipelineMode parse_mode(std::string_view text);

struct StratumProbability {
  std::string label;
  Rational probability;
  double value;
};

struct FisherPipelineResult {
  PipelineMode mode = PipelineMode::Stratified;
  std::vector<StratumProbability> strata;  // one "pooled" entry in collapsed mode
  Rational combined;                       // product of the entries above
  std::uint64_t n_nurses = 1;
  Rational corrected;                      // n_nurses * combined
  Rational one_in_n;                       // 1 / corrected
  bool exceeds_one = false;                // corrected > 1, reported as is
};

/// One-sided Fisher tails combined by multiplication, then scaled by the
/// post-hoc factor `n_nurses`. Throws ValidationError when n_nurses is 0.
FisherPipelineResult fisher_pipeline(const StratifiedTable& s, std::uint64_t n_nurses, PipelineMode mode);

/// Suspect row treated as n = row1 draws with replacement at the other
/// group's rate p0 = c / (c + d).
struct BinomialAnalysisResult {
  Count n;
  Rational p0;
  std::optional<Rational> p1;  // a / n, undefined for n = 0
  Count k_obs;
  TailTable tail;
  Rational tail_at_obs;
  std::optional<Rational> one_in_n;  // 1 / tail_at_obs; nullopt when that tail is 0
  Rational expected;           // n * p0
  Rational tau;
  std::optional<Count> k_star;  // smallest tabulated k with tail < tau
};

/// `k_range` defaults to 0 .. min(k_obs + 1, n + 1). Throws
/// ValidationError when row 2 is empty (p0 cannot be formed).
BinomialAnalysisResult binomial_analysis(const Table2x2& t, std::optional<std::pair<Count, Count>> k_range,
                                         const Rational& tau);

inline const Rational kDefaultTau{1, 20};

struct DatasetCorrelation {
  std::string dataset;
  CollapseComparison comparison;
  std::optional<double> multiway_reference;
};

struct OneInNRow {
  std::string dataset;
  FisherPipelineResult not_summed;
  FisherPipelineResult summed;
};

struct SimpsonSection {
  std::string dataset;
  SimpsonVerdict verdict;
};

struct BinomialSection {
  std::string dataset;
  BinomialAnalysisResult result;
};

struct ReferenceCheck {
  std::string dataset;
  std::string id;
  std::string expected;
  std::string actual;
  bool passed = false;
};

/// Everything is recomputed from the datasets when the report is built.
struct AnalysisReport {
  std::vector<std::string> datasets;
  std::vector<DatasetCorrelation> correlations;
  std::vector<OneInNRow> one_in_n;  // datasets with a nurse count
  RateTable rates;
  std::vector<SimpsonSection> simpson;    // datasets with two or more strata
  std::vector<BinomialSection> binomial;  // datasets with a nurse count
  std::vector<std::string> notes;
  std::vector<ReferenceCheck> checks;

  bool all_checks_passed() const;
};

/// Relative tolerance against 6-significant-figure reference values.
inline constexpr double kReferenceTolerance = 1e-4;

/// Builds the report for `datasets` in order and runs the reference
/// checks registered under each dataset's name.
AnalysisReport build_report(const std::vector<Dataset>& datasets, const Rational& tau = kDefaultTau);

/// Resolves `names` against `overrides` first, then the embedded
/// datasets (an override keeps the embedded configuration of the same
/// name). Throws InputError for an unknown name.
AnalysisReport replicate(const std::vector<std::string>& names,
                         const std::map<std::string, StratifiedTable>& overrides = {},
                         const Rational& tau = kDefaultTau);

/// Reference checks for one dataset section of `report`; empty when no
/// reference values exist under that name.
std::vector<ReferenceCheck> check_references(const AnalysisReport& report, const std::string& dataset);

}  // namespace ctaudit
