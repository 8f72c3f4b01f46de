#include "ctaudit/report.hpp"

#include <algorithm>
#include <sstream>

namespace ctaudit {

using nlohmann::json;

namespace {

constexpr int kDecimalDigits = 20;
constexpr std::size_t kMaxExactLength = 64;

json rate_json(const Rate& r) {
  json out{{"incidents", r.incidents.str()}, {"shifts", r.shifts.str()}};
  out["rate"] = r.value ? probability_json(*r.value) : json(nullptr);
  return out;
}

json optional_double(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string show(double v) { return format_sig(v); }

std::string show_rate(const Rate& r) { return r.value ? show(r.as_double()) : "undefined"; }

}  // namespace

json probability_json(const Rational& q) {
  const double value = to_double(q);
  json out{{"value", value}, {"display", format_sig(value)}, {"decimal", to_decimal(q, kDecimalDigits)}};
  const std::string exact = to_fraction_string(q);
  if (exact.size() <= kMaxExactLength) out["exact"] = exact;
  return out;
}

json to_json(const NominalCorrelationResult& r) {
  return {{"value", r.value},
          {"display", format_sig(r.value)},
          {"det", r.det.str()},
          {"value_squared", probability_json(r.value_squared)},
          {"row_picture_ratio", r.row_picture_ratio},
          {"col_picture_ratio", r.col_picture_ratio}};
}

json to_json(const OddsRatio& r) {
  json out{{"kind", r.is_finite() ? "finite" : r.to_string()}, {"text", r.to_string()}};
  out["value"] = r.is_finite() ? json(to_double(r.value())) : json(nullptr);
  return out;
}

json to_json(const CollapseComparison& c) {
  json strata = json::array();
  for (std::size_t i = 0; i < c.stratified.size(); ++i) {
    json entry = to_json(c.stratified[i].result);
    entry["stratum"] = c.stratified[i].label;
    entry["pooled_minus_stratum"] = c.stratum_deltas[i];
    strata.push_back(std::move(entry));
  }
  return {{"stratified", strata},
          {"pooled", to_json(c.pooled)},
          {"flattened_volume_ratio", optional_double(c.flattened_volume_ratio)},
          {"pooled_minus_flattened", optional_double(c.flattened_delta)}};
}

json to_json(const SimpsonVerdict& v) {
  json strata = json::array();
  for (const auto& s : v.strata) {
    strata.push_back({{"stratum", s.label}, {"odds_ratio", to_json(s.odds_ratio)}, {"direction", to_string(s.direction)}});
  }
  return {{"strata", strata},
          {"pooled", {{"odds_ratio", to_json(v.pooled)}, {"direction", to_string(v.pooled_direction)}}},
          {"paradox", v.paradox},
          {"notes", v.notes}};
}

json to_json(const RateTable& t) {
  json entries = json::array();
  for (const auto& e : t.entries) {
    entries.push_back({{"dataset", e.dataset}, {"stratum", e.stratum}, {"suspect", rate_json(e.suspect)},
                       {"other", rate_json(e.other)}});
  }
  json pooled = json::array();
  for (const auto& p : t.pooled) {
    pooled.push_back({{"dataset", p.dataset}, {"p1", rate_json(p.p1)}, {"p0", rate_json(p.p0)}});
  }
  return {{"entries", entries}, {"pooled", pooled}};
}

json to_json(const FisherPipelineResult& r) {
  json strata = json::array();
  for (const auto& s : r.strata) strata.push_back({{"stratum", s.label}, {"p", probability_json(s.probability)}});
  return {{"mode", to_string(r.mode)},
          {"label", overview_label(r.mode)},
          {"strata", strata},
          {"combined", probability_json(r.combined)},
          {"n_nurses", r.n_nurses},
          {"corrected", probability_json(r.corrected)},
          {"one_in_n", probability_json(r.one_in_n)},
          {"exceeds_one", r.exceeds_one}};
}

json to_json(const TailTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) rows.push_back({{"k", row.threshold.str()}, {"p_ge_k", probability_json(row.probability)}});
  return rows;
}

json to_json(const BinomialAnalysisResult& r) {
  json out{{"n", r.n.str()},
           {"p0", probability_json(r.p0)},
           {"k_obs", r.k_obs.str()},
           {"tail", to_json(r.tail)},
           {"tail_at_obs", probability_json(r.tail_at_obs)},
           {"one_in_n", r.one_in_n ? probability_json(*r.one_in_n) : json(nullptr)},
           {"expected", probability_json(r.expected)},
           {"tau", probability_json(r.tau)}};
  out["p1"] = r.p1 ? probability_json(*r.p1) : json(nullptr);
  out["k_star"] = r.k_star ? json(r.k_star->str()) : json(nullptr);
  return out;
}

json to_json(const DatasetDiff& d) {
  json strata = json::array();
  for (const auto& s : d.strata) {
    strata.push_back({{"stratum", s.label},
                      {"cells", json::array({json::array({s.cells[0].str(), s.cells[1].str()}),
                                             json::array({s.cells[2].str(), s.cells[3].str()})})},
                      {"row1", s.row1.str()},
                      {"row2", s.row2.str()},
                      {"col1", s.col1.str()},
                      {"col2", s.col2.str()},
                      {"total", s.total.str()}});
  }
  return {{"from", d.from},
          {"to", d.to},
          {"strata", strata},
          {"suspect_incidents", d.suspect_incidents.str()},
          {"other_incidents", d.other_incidents.str()},
          {"incidents_removed", d.incidents_removed.str()},
          {"incidents_added", d.incidents_added.str()},
          {"total", d.total.str()}};
}

json to_json(const FigureModel& f) {
  auto point = [](const Point& p) { return json::array({p.x.str(), p.y.str()}); };
  json polygon = json::array();
  for (const auto& p : f.parallelogram) polygon.push_back(point(p));
  json out{{"v1", point(f.v1)},
           {"v2", point(f.v2)},
           {"parallelogram", polygon},
           {"rectangle", {{"width", f.rect_width.str()}, {"height", f.rect_height.str()}}},
           {"parallelogram_area", f.parallelogram_area.str()},
           {"rectangle_area", f.rectangle_area.str()},
           {"correlation", to_json(f.correlation)}};
  out["area_ratio"] = f.area_ratio ? probability_json(*f.area_ratio) : json(nullptr);
  return out;
}

json to_json(const AnalysisReport& report) {
  json correlations = json::array();
  for (const auto& c : report.correlations) {
    json entry = to_json(c.comparison);
    entry["dataset"] = c.dataset;
    entry["multiway_reference"] = optional_double(c.multiway_reference);
    correlations.push_back(std::move(entry));
  }
  json one_in_n = json::array();
  for (const auto& row : report.one_in_n) {
    one_in_n.push_back({{"dataset", row.dataset},
                        {"n_nurses", row.not_summed.n_nurses},
                        {"not_summed", to_json(row.not_summed)},
                        {"summed", to_json(row.summed)}});
  }
  json simpson = json::array();
  for (const auto& s : report.simpson) {
    json entry = to_json(s.verdict);
    entry["dataset"] = s.dataset;
    simpson.push_back(std::move(entry));
  }
  json binomial = json::array();
  for (const auto& b : report.binomial) {
    json entry = to_json(b.result);
    entry["dataset"] = b.dataset;
    binomial.push_back(std::move(entry));
  }
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"dataset", c.dataset}, {"id", c.id}, {"expected", c.expected}, {"actual", c.actual},
                      {"passed", c.passed}});
  }
  return {{"schema", "ctaudit.report/1"},
          {"datasets", report.datasets},
          {"correlation_overview", correlations},
          {"one_in_n_overview", one_in_n},
          {"rate_table", to_json(report.rates)},
          {"simpson", simpson},
          {"binomial", binomial},
          {"notes", report.notes},
          {"checks", checks},
          {"all_checks_passed", report.all_checks_passed()}};
}

std::string align_columns(const std::vector<std::vector<std::string>>& rows, const std::string& indent) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line = indent;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(widths[i] - row[i].size() + 2, ' ');
    }
    out << line << '\n';
  }
  return out.str();
}

std::string render_text(const AnalysisReport& report) {
  std::ostringstream out;
  if (report.datasets.empty()) {
    out << "No datasets.\n";
    return out.str();
  }

  out << "Correlation overview\n";
  std::vector<std::vector<std::string>> rows{{"dataset", "stratified", "pooled", "flattened*", "multiway ref**"}};
  for (const auto& c : report.correlations) {
    std::string strata;
    for (const auto& s : c.comparison.stratified) {
      strata += (strata.empty() ? "" : ", ") + s.label + " " + show(s.result.value);
    }
    rows.push_back({c.dataset, strata, show(c.comparison.pooled.value),
                    c.comparison.flattened_volume_ratio ? show(*c.comparison.flattened_volume_ratio) : "-",
                    c.multiway_reference ? show(*c.multiway_reference) : "-"});
  }
  out << align_columns(rows);
  out << "  * stacked-strata volume ratio computed here; ** published value, not recomputed\n\n";

  if (!report.one_in_n.empty()) {
    out << "One-in-N overview (1 / (nurses x Fisher upper tail))\n";
    rows = {{"", "Not summed", "Summed"}};
    for (const auto& r : report.one_in_n) {
      rows.push_back({r.dataset, show(to_double(r.not_summed.one_in_n)), show(to_double(r.summed.one_in_n))});
    }
    out << align_columns(rows);
    for (const auto& r : report.one_in_n) {
      std::string strata;
      for (const auto& s : r.not_summed.strata) strata += (strata.empty() ? "" : ", ") + s.label + " " + show(s.value);
      out << "  " << r.dataset << ": per-stratum tails {" << strata << "}, x" << r.not_summed.n_nurses << " = "
          << show(to_double(r.not_summed.corrected)) << "; pooled tail " << show(r.summed.strata.front().value)
          << (r.not_summed.exceeds_one || r.summed.exceeds_one ? " (corrected p exceeds 1)" : "") << '\n';
    }
    out << '\n';
  }

  out << "Rate table (incidents per shift)\n";
  rows = {{"dataset", "stratum", "row 1 (suspect)", "row 2 (others)"}};
  for (const auto& e : report.rates.entries) rows.push_back({e.dataset, e.stratum, show_rate(e.suspect), show_rate(e.other)});
  for (const auto& p : report.rates.pooled) rows.push_back({p.dataset, "pooled", show_rate(p.p1), show_rate(p.p0)});
  out << align_columns(rows) << '\n';

  if (!report.simpson.empty()) {
    out << "Simpson check (exact odds ratios)\n";
    for (const auto& s : report.simpson) {
      out << "  " << s.dataset << ":";
      for (const auto& st : s.verdict.strata) {
        out << ' ' << st.label << ' ' << st.odds_ratio.to_string() << " (" << to_string(st.direction) << ')';
      }
      out << "; pooled " << s.verdict.pooled.to_string() << " (" << to_string(s.verdict.pooled_direction)
          << "); paradox: " << (s.verdict.paradox ? "true" : "false") << '\n';
      for (const auto& note : s.verdict.notes) out << "    note: " << note << '\n';
    }
    out << '\n';
  }

  for (const auto& b : report.binomial) {
    const auto& r = b.result;
    out << "Binomial model: " << b.dataset << " (n = " << r.n << ", p0 = " << to_fraction_string(r.p0) << " = "
        << show(to_double(r.p0)) << ", p1 = " << (r.p1 ? show(to_double(*r.p1)) : "undefined") << ")\n";
    rows.clear();
    for (const auto& row : r.tail.rows) rows.push_back({"Cases >= " + row.threshold.str(), show(row.value)});
    out << align_columns(rows, "    ");
    out << "  P(X >= " << r.k_obs << ") = " << show(to_double(r.tail_at_obs))
        << (r.one_in_n ? ", one in " + show(to_double(*r.one_in_n)) : std::string(", impossible at p0")) << '\n';
    out << "  expected n*p0 = " << show(to_double(r.expected)) << "; first k with tail < " << show(to_double(r.tau))
        << ": " << (r.k_star ? r.k_star->str() : "none in range") << "\n\n";
  }

  for (const auto& note : report.notes) out << "note: " << note << '\n';

  if (!report.checks.empty()) {
    const auto passed = std::count_if(report.checks.begin(), report.checks.end(), [](const auto& c) { return c.passed; });
    out << "\nReference checks: " << passed << "/" << report.checks.size() << " passed\n";
    for (const auto& c : report.checks) {
      if (!c.passed) {
        out << "  MISMATCH " << c.dataset << ' ' << c.id << ": expected " << c.expected << ", got " << c.actual << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace ctaudit
