#include "ctaudit/table.hpp"

#include <algorithm>

#include "ctaudit/error.hpp"

namespace ctaudit {

namespace {

const char* const kCellNames[4] = {"a", "b", "c", "d"};

std::string position(std::size_t row, std::size_t col) {
  return "(" + std::to_string(row + 1) + "," + std::to_string(col + 1) + ")";
}

}  // namespace

Table2x2::Table2x2(Count a, Count b, Count c, Count d, LabelPair row_labels, LabelPair col_labels)
    : cells_{std::move(a), std::move(b), std::move(c), std::move(d)},
      row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)) {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] < 0) {
      throw ValidationError("cell " + position(i / 2, i % 2) + " [" + kCellNames[i] +
                            "] is negative: " + cells_[i].str());
    }
  }
}

Margins Table2x2::margins() const {
  return Margins{a() + b(), c() + d(), a() + c(), b() + d(), a() + b() + c() + d()};
}

Table2x2 Table2x2::transposed() const { return Table2x2(a(), c(), b(), d(), col_labels_, row_labels_); }

Table2x2 Table2x2::with_labels(LabelPair rows, LabelPair cols) const {
  return Table2x2(a(), b(), c(), d(), std::move(rows), std::move(cols));
}

CountMatrix bordered(const Table2x2& t) {
  const Margins m = t.margins();
  return {{t.a(), t.b(), m.row1}, {t.c(), t.d(), m.row2}, {m.col1, m.col2, m.total}};
}

Table2x2 validate(const CountMatrix& raw, const std::optional<Margins>& supplied, LabelPair row_labels,
                  LabelPair col_labels) {
  const std::size_t dim = raw.size();
  if (dim != 2 && dim != 3) {
    throw InputError("expected a 2x2 or bordered 3x3 matrix, got " + std::to_string(dim) + " rows");
  }
  for (std::size_t r = 0; r < dim; ++r) {
    if (raw[r].size() != dim) {
      throw InputError("row " + std::to_string(r + 1) + " has " + std::to_string(raw[r].size()) +
                       " entries, expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      if (raw[r][c] < 0) throw ValidationError("cell " + position(r, c) + " is negative: " + raw[r][c].str());
    }
  }

  Table2x2 table(raw[0][0], raw[0][1], raw[1][0], raw[1][1], std::move(row_labels), std::move(col_labels));
  const Margins derived = table.margins();

  auto check = [](const Count& given, const Count& actual, const std::string& where) {
    if (given != actual) {
      throw ValidationError("cell " + where + ": supplied margin " + given.str() + " but cells sum to " +
                            actual.str());
    }
  };
  if (dim == 3) {
    check(raw[0][2], derived.row1, position(0, 2));
    check(raw[1][2], derived.row2, position(1, 2));
    check(raw[2][0], derived.col1, position(2, 0));
    check(raw[2][1], derived.col2, position(2, 1));
    check(raw[2][2], derived.total, position(2, 2));
  }
  if (supplied) {
    check(supplied->row1, derived.row1, "row1 sum");
    check(supplied->row2, derived.row2, "row2 sum");
    check(supplied->col1, derived.col1, "col1 sum");
    check(supplied->col2, derived.col2, "col2 sum");
    check(supplied->total, derived.total, "total");
  }
  return table;
}

StratifiedTable::StratifiedTable(std::string name, std::vector<Stratum> strata)
    : name_(std::move(name)), strata_(std::move(strata)) {
  if (strata_.empty()) throw ValidationError("dataset '" + name_ + "' has no strata");
  const auto& first = strata_.front().table;
  for (const auto& s : strata_) {
    if (s.table.row_labels() != first.row_labels() || s.table.col_labels() != first.col_labels()) {
      throw ValidationError("stratum '" + s.label + "' of dataset '" + name_ +
                            "' has row/column labels different from stratum '" + strata_.front().label + "'");
    }
  }
}

const Stratum& StratifiedTable::at(const std::string& label) const {
  const auto it = std::find_if(strata_.begin(), strata_.end(), [&](const Stratum& s) { return s.label == label; });
  if (it == strata_.end()) throw ValidationError("dataset '" + name_ + "' has no stratum '" + label + "'");
  return *it;
}

StratifiedTable StratifiedTable::transposed() const {
  std::vector<Stratum> out;
  out.reserve(strata_.size());
  for (const auto& s : strata_) out.push_back({s.label, s.table.transposed()});
  return StratifiedTable(name_, std::move(out));
}

StratifiedTable StratifiedTable::renamed(std::string name) const { return StratifiedTable(std::move(name), strata_); }

Table2x2 collapse(const StratifiedTable& s) {
  std::array<Count, 4> sum{};
  for (const auto& stratum : s.strata()) {
    for (std::size_t i = 0; i < 4; ++i) sum[i] += stratum.table.cells()[i];
  }
  return Table2x2(sum[0], sum[1], sum[2], sum[3], s.row_labels(), s.col_labels());
}

DatasetDiff diff(const StratifiedTable& from, const StratifiedTable& to) {
  if (from.size() != to.size()) {
    throw ValidationError("cannot diff '" + from.name() + "' (" + std::to_string(from.size()) + " strata) against '" +
                          to.name() + "' (" + std::to_string(to.size()) + " strata)");
  }
  if (from.row_labels() != to.row_labels() || from.col_labels() != to.col_labels()) {
    throw ValidationError("cannot diff '" + from.name() + "' against '" + to.name() + "': row/column labels differ");
  }

  DatasetDiff out;
  out.from = from.name();
  out.to = to.name();
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Stratum& x = from.strata()[i];
    const Stratum& y = to.strata()[i];
    if (x.label != y.label) {
      throw ValidationError("stratum " + std::to_string(i + 1) + " is '" + x.label + "' in '" + from.name() +
                            "' but '" + y.label + "' in '" + to.name() + "'");
    }
    StratumDelta delta;
    delta.label = x.label;
    for (std::size_t c = 0; c < 4; ++c) delta.cells[c] = y.table.cells()[c] - x.table.cells()[c];
    const Margins mx = x.table.margins();
    const Margins my = y.table.margins();
    delta.row1 = my.row1 - mx.row1;
    delta.row2 = my.row2 - mx.row2;
    delta.col1 = my.col1 - mx.col1;
    delta.col2 = my.col2 - mx.col2;
    delta.total = my.total - mx.total;

    out.suspect_incidents += delta.cells[0];
    out.other_incidents += delta.cells[2];
    for (const std::size_t c : {std::size_t{0}, std::size_t{2}}) {
      if (delta.cells[c] < 0) out.incidents_removed -= delta.cells[c];
      if (delta.cells[c] > 0) out.incidents_added += delta.cells[c];
    }
    out.total += delta.total;
    out.strata.push_back(std::move(delta));
  }
  return out;
}

StratifiedTable apply(const StratifiedTable& base, const DatasetDiff& delta) {
  if (base.size() != delta.strata.size()) {
    throw ValidationError("diff has " + std::to_string(delta.strata.size()) + " strata but dataset '" + base.name() +
                          "' has " + std::to_string(base.size()));
  }
  std::vector<Stratum> out;
  out.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Stratum& s = base.strata()[i];
    const StratumDelta& d = delta.strata[i];
    if (s.label != d.label) {
      throw ValidationError("diff stratum '" + d.label + "' does not match dataset stratum '" + s.label + "'");
    }
    const auto& cells = s.table.cells();
    out.push_back({s.label, Table2x2(cells[0] + d.cells[0], cells[1] + d.cells[1], cells[2] + d.cells[2],
                                     cells[3] + d.cells[3], s.table.row_labels(), s.table.col_labels())});
  }
  return StratifiedTable(delta.to.empty() ? base.name() : delta.to, std::move(out));
}

}  // namespace ctaudit
