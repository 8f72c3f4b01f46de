#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ctaudit/rational.hpp"

namespace ctaudit {

using Count = BigInt;
using LabelPair = std::array<std::string, 2>;
using CountMatrix = std::vector<std::vector<Count>>;

// Row 1 is the suspect group, column 1 the incident column.
inline const LabelPair kDefaultRowLabels{"V", "Other"};
inline const LabelPair kDefaultColLabels{"Incident", "No incident"};

struct Margins {
  Count row1;
  Count row2;
  Count col1;
  Count col2;
  Count total;

  bool operator==(const Margins&) const = default;
};

/// A 2x2 table of non-negative counts
///
///              col1  col2
///     row1  [   a     b  ]
///     row2  [   c     d  ]
///
/// In hypergeometric terms: n = total, r = row1, k = col1, x = a.
class Table2x2 {
public:
  Table2x2() : Table2x2(0, 0, 0, 0) {}
  /// Throws ValidationError naming the cell when a count is negative.
  Table2x2(Count a, Count b, Count c, Count d, LabelPair row_labels = kDefaultRowLabels,
           LabelPair col_labels = kDefaultColLabels);

  const Count& a() const { return cells_[0]; }
  const Count& b() const { return cells_[1]; }
  const Count& c() const { return cells_[2]; }
  const Count& d() const { return cells_[3]; }
  /// Zero-based row and column.
  const Count& cell(int row, int col) const { return cells_.at(static_cast<std::size_t>(2 * row + col)); }
  const std::array<Count, 4>& cells() const { return cells_; }

  const LabelPair& row_labels() const { return row_labels_; }
  const LabelPair& col_labels() const { return col_labels_; }

  Margins margins() const;
  Table2x2 transposed() const;
  Table2x2 with_labels(LabelPair rows, LabelPair cols) const;

  bool operator==(const Table2x2&) const = default;

private:
  std::array<Count, 4> cells_;
  LabelPair row_labels_;
  LabelPair col_labels_;
};

inline Margins margins(const Table2x2& t) { return t.margins(); }
inline Table2x2 transpose(const Table2x2& t) { return t.transposed(); }

/// 3x3 form with the "Sum" row and column appended.
CountMatrix bordered(const Table2x2& t);

/// Accepts an inner 2x2 matrix or a bordered 3x3 one. Border sums, and
/// `supplied` when given, are checked against the cells.
/// Throws InputError for a wrong shape and ValidationError for a negative
/// count or an inconsistent margin; each message names the offending cell.
Table2x2 validate(const CountMatrix& raw, const std::optional<Margins>& supplied = std::nullopt,
                  LabelPair row_labels = kDefaultRowLabels, LabelPair col_labels = kDefaultColLabels);

struct Stratum {
  std::string label;
  Table2x2 table;

  bool operator==(const Stratum&) const = default;
};

/// Ordered, labeled strata sharing one pair of row and column labels.
class StratifiedTable {
public:
  /// Throws ValidationError when `strata` is empty or the labels disagree.
  StratifiedTable(std::string name, std::vector<Stratum> strata);

  const std::string& name() const { return name_; }
  const std::vector<Stratum>& strata() const { return strata_; }
  std::size_t size() const { return strata_.size(); }
  const LabelPair& row_labels() const { return strata_.front().table.row_labels(); }
  const LabelPair& col_labels() const { return strata_.front().table.col_labels(); }

  const Stratum& at(const std::string& label) const;
  StratifiedTable transposed() const;
  StratifiedTable renamed(std::string name) const;

  bool operator==(const StratifiedTable&) const = default;

private:
  std::string name_;
  std::vector<Stratum> strata_;
};

/// Cell-wise sum over strata, keeping the shared labels.
Table2x2 collapse(const StratifiedTable& s);

struct StratumDelta {
  std::string label;
  std::array<BigInt, 4> cells;  // to - from, in a, b, c, d order
  BigInt row1;
  BigInt row2;
  BigInt col1;
  BigInt col2;
  BigInt total;
};

/// Signed per-cell changes taking dataset `from` to dataset `to`.
struct DatasetDiff {
  std::string from;
  std::string to;
  std::vector<StratumDelta> strata;
  BigInt suspect_incidents;  // sum of cell (1,1) deltas
  BigInt other_incidents;    // sum of cell (2,1) deltas
  BigInt incidents_removed;  // magnitude of negative column-1 deltas
  BigInt incidents_added;    // positive column-1 deltas
  BigInt total;
};

/// Throws ValidationError when stratum labels or row/column labels differ.
DatasetDiff diff(const StratifiedTable& from, const StratifiedTable& to);

/// Applies `delta` to `base`; throws ValidationError on a label mismatch
/// or a resulting negative count.
StratifiedTable apply(const StratifiedTable& base, const DatasetDiff& delta);

}  // namespace ctaudit
