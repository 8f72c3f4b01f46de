#include "ctaudit/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "ctaudit/error.hpp"
#include "ctaudit/report.hpp"
#include "ctaudit/simulate.hpp"
#include "ctaudit/svg.hpp"

namespace ctaudit {

using nlohmann::json;

namespace {

struct Options {
  std::string dataset;
  std::string input;
  std::string format = "text";
  std::optional<std::uint64_t> nurses;
  std::string tau;
  std::string mode = "stratified";
  bool transpose = false;
  std::string out;
  std::string stratum;

  // binomial
  std::optional<std::uint64_t> k_min;
  std::optional<std::uint64_t> k_max;

  // replicate / diff
  std::vector<std::string> names;
  std::vector<std::string> inputs;

  // simulate
  std::string model = "binomial";
  std::string spec_path;
  std::optional<std::uint64_t> k;
  std::optional<std::uint64_t> draws;
  std::string p;
  std::optional<std::uint64_t> population;
  std::optional<std::uint64_t> successes;
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string log_path;

  // svg
  int width = 640;
  int height = 480;
};

void add_source(CLI::App* cmd, Options& o) {
  auto* ds = cmd->add_option("--dataset", o.dataset, "Embedded dataset (original, derksen, shops)");
  auto* in = cmd->add_option("--input", o.input, "Dataset file (.json or .csv)");
  ds->excludes(in);
  cmd->add_flag("--transpose", o.transpose, "Swap rows and columns of every stratum");
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("--out", o.out, "Write output to PATH instead of stdout");
}

Rational tau_of(const Options& o) { return o.tau.empty() ? kDefaultTau : parse_rational(o.tau); }

// Resolves --dataset / --input. An embedded dataset keeps its config; a
// transposed one is renamed so reference checks do not apply to it.
Dataset resolve(const Options& o) {
  if (o.dataset.empty() && o.input.empty()) throw InputError("no input: give --dataset NAME or --input PATH");
  Dataset d = o.dataset.empty() ? Dataset{load_dataset(o.input), {}} : embedded_dataset(o.dataset);
  if (o.transpose) d.table = d.table.transposed().renamed(d.table.name() + " (transposed)");
  if (o.nurses) d.config.n_nurses = *o.nurses;
  return d;
}

// Embedded name first, then a path.
StratifiedTable resolve_name_or_path(const std::string& arg) {
  for (const auto& name : embedded_names()) {
    if (name == arg) return embedded_dataset(name).table;
  }
  return load_dataset(arg);
}

const Table2x2& pick_table(const StratifiedTable& s, const std::string& stratum, Table2x2& pooled) {
  if (stratum.empty() || stratum == "pooled") {
    pooled = collapse(s);
    return pooled;
  }
  return s.at(stratum).table;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string cell = cells[i];
    if (cell.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : cell) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      cell = quoted + "\"";
    }
    line += (i ? "," : "") + cell;
  }
  return line + "\n";
}

std::string show(const Rational& q) { return format_sig(to_double(q)); }

std::string cmd_analyze(const Options& o) {
  Dataset d = resolve(o);
  const bool modified = o.nurses && embedded_names().end() !=
                                        std::find(embedded_names().begin(), embedded_names().end(), d.table.name()) &&
                        embedded_dataset(d.table.name()).config.n_nurses != o.nurses;
  if (!d.config.n_nurses && o.dataset.empty()) d.config.n_nurses = 1;
  AnalysisReport report = build_report({d}, tau_of(o));
  if (modified) {
    report.checks.clear();
    report.notes.push_back("nurse count overridden; reference checks skipped");
  }

  if (o.format == "json") return to_json(report).dump(2) + "\n";
  if (o.format == "csv") {
    std::string out = csv_row({"dataset", "stratum", "a", "b", "c", "d", "correlation", "odds_ratio", "fisher_tail"});
    auto row = [&](const std::string& label, const Table2x2& t) {
      out += csv_row({d.table.name(), label, t.a().str(), t.b().str(), t.c().str(), t.d().str(),
                      format_sig(nominal_correlation(t).value, 17), odds_ratio(t).to_string(),
                      to_decimal(fisher_upper_tail(t), 17)});
    };
    for (const auto& s : d.table.strata()) row(s.label, s.table);
    row("pooled", collapse(d.table));
    return out;
  }
  return render_text(report);
}

std::string cmd_fisher(const Options& o) {
  const Dataset d = resolve(o);
  const auto result = fisher_pipeline(d.table, o.nurses.value_or(d.config.n_nurses.value_or(1)), parse_mode(o.mode));
  if (o.format == "json") {
    json j = to_json(result);
    j["dataset"] = d.table.name();
    return j.dump(2) + "\n";
  }
  if (o.format == "csv") {
    std::string out = csv_row({"stratum", "probability"});
    for (const auto& s : result.strata) out += csv_row({s.label, to_decimal(s.probability, 17)});
    out += csv_row({"combined", to_decimal(result.combined, 17)});
    out += csv_row({"corrected", to_decimal(result.corrected, 17)});
    out += csv_row({"one_in_n", to_decimal(result.one_in_n, 17)});
    return out;
  }
  std::ostringstream out;
  out << "Fisher upper tails: " << d.table.name() << " (" << overview_label(result.mode) << ")\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : result.strata) rows.push_back({s.label, format_sig(s.value)});
  rows.push_back({"combined", show(result.combined)});
  rows.push_back({"x " + std::to_string(result.n_nurses) + " nurses", show(result.corrected)});
  rows.push_back({"one in N", show(result.one_in_n)});
  out << align_columns(rows);
  if (result.exceeds_one) out << "  note: corrected probability exceeds 1\n";
  return out.str();
}

std::string cmd_binomial(const Options& o) {
  const Dataset d = resolve(o);
  Table2x2 pooled;
  const Table2x2& t = pick_table(d.table, o.stratum, pooled);
  std::optional<std::pair<Count, Count>> range;
  if (o.k_min || o.k_max) {
    const auto m = t.margins();
    range = std::pair<Count, Count>{o.k_min.value_or(0), o.k_max ? Count(*o.k_max) : Count(m.row1 + 1)};
  } else if (d.config.tail_range && (o.stratum.empty() || o.stratum == "pooled")) {
    range = std::pair<Count, Count>{d.config.tail_range->first, d.config.tail_range->second};
  }
  const auto r = binomial_analysis(t, range, tau_of(o));
  if (o.format == "json") {
    json j = to_json(r);
    j["dataset"] = d.table.name();
    j["stratum"] = o.stratum.empty() ? "pooled" : o.stratum;
    return j.dump(2) + "\n";
  }
  if (o.format == "csv") {
    std::string out = csv_row({"k", "probability"});
    for (const auto& row : r.tail.rows) out += csv_row({row.threshold.str(), to_decimal(row.probability, 17)});
    return out;
  }
  std::ostringstream out;
  out << "Binomial model: " << d.table.name() << " " << (o.stratum.empty() ? "pooled" : o.stratum) << " (n = " << r.n
      << ", p0 = " << to_fraction_string(r.p0) << " = " << show(r.p0) << ")\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.tail.rows) rows.push_back({"Cases >= " + row.threshold.str(), format_sig(row.value)});
  out << align_columns(rows);
  out << "  observed " << r.k_obs << ": P(X >= " << r.k_obs << ") = " << show(r.tail_at_obs)
      << (r.one_in_n ? ", one in " + show(*r.one_in_n) : std::string(", impossible at p0")) << "\n";
  out << "  expected n*p0 = " << show(r.expected) << "; first k with tail < " << show(r.tau) << ": "
      << (r.k_star ? r.k_star->str() : "none in range") << "\n";
  return out.str();
}

std::string cmd_simpson(const Options& o) {
  const Dataset d = resolve(o);
  const auto v = simpson_check(d.table);
  if (o.format == "json") {
    json j = to_json(v);
    j["dataset"] = d.table.name();
    return j.dump(2) + "\n";
  }
  if (o.format == "csv") {
    std::string out = csv_row({"stratum", "odds_ratio", "direction"});
    for (const auto& s : v.strata) out += csv_row({s.label, s.odds_ratio.to_string(), to_string(s.direction)});
    out += csv_row({"pooled", v.pooled.to_string(), to_string(v.pooled_direction)});
    return out;
  }
  std::ostringstream out;
  out << "Simpson check: " << d.table.name() << "\n";
  std::vector<std::vector<std::string>> rows{{"stratum", "odds ratio", "vs 1"}};
  for (const auto& s : v.strata) rows.push_back({s.label, s.odds_ratio.to_string(), to_string(s.direction)});
  rows.push_back({"pooled", v.pooled.to_string(), to_string(v.pooled_direction)});
  out << align_columns(rows);
  out << "paradox: " << (v.paradox ? "true" : "false") << "\n";
  for (const auto& note : v.notes) out << "note: " << note << "\n";
  return out.str();
}

std::string cmd_replicate(const Options& o, bool& mismatch) {
  std::map<std::string, StratifiedTable> overrides;
  std::vector<std::string> names = o.names.empty() ? embedded_names() : o.names;
  for (const auto& path : o.inputs) {
    StratifiedTable t = load_dataset(path);
    const std::string name = t.name();
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    overrides.insert_or_assign(name, std::move(t));
  }
  const AnalysisReport report = replicate(names, overrides, tau_of(o));
  mismatch = !report.all_checks_passed();

  if (o.format == "json") return to_json(report).dump(2) + "\n";
  if (o.format == "csv") {
    std::string out = csv_row({"dataset", "check", "expected", "actual", "passed"});
    for (const auto& c : report.checks) out += csv_row({c.dataset, c.id, c.expected, c.actual, c.passed ? "true" : "false"});
    return out;
  }
  return render_text(report) + (mismatch ? "replication: MISMATCH\n" : "replication: ok\n");
}

SimulationSpec spec_from_flags(const Options& o, std::uint64_t& k) {
  SimulationSpec spec;
  if (!o.spec_path.empty()) {
    std::ifstream in(o.spec_path);
    if (!in) throw InputError(o.spec_path + ": cannot open");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw InputError(o.spec_path + ": " + e.what());
    }
    spec = simulation_spec_from_json(j);
    if (!o.k) throw InputError("simulate: --k is required with --spec");
    k = *o.k;
  } else if (!o.dataset.empty() || !o.input.empty()) {
    const Dataset d = resolve(o);
    Table2x2 pooled;
    const Table2x2& t = pick_table(d.table, o.stratum, pooled);
    const Margins m = t.margins();
    spec.model = parse_model(o.model);
    if (spec.model == SimulationModel::Binomial) {
      if (m.row2 == 0) throw ValidationError("simulate: row 2 is empty, no rate to draw from");
      spec.draws = to_u64(m.row1, "row 1 total");
      spec.p = Rational(t.c(), m.row2);
    } else if (spec.model == SimulationModel::Hypergeometric) {
      spec.population = to_u64(m.total, "table total");
      spec.draws = to_u64(m.row1, "row 1 total");
      spec.successes = to_u64(m.col1, "column 1 total");
    } else {
      throw InputError("simulate: the heterogeneous model needs --spec");
    }
    k = o.k ? *o.k : to_u64(t.a(), "observed count");
  } else {
    spec.model = parse_model(o.model);
    if (!o.k || !o.draws) throw InputError("simulate: give --spec, a dataset, or --draws and --k");
    spec.draws = *o.draws;
    if (spec.model == SimulationModel::Binomial) {
      if (o.p.empty()) throw InputError("simulate: binomial model needs --p");
      spec.p = parse_rational(o.p);
    } else if (spec.model == SimulationModel::Hypergeometric) {
      if (!o.population || !o.successes) throw InputError("simulate: hypergeometric model needs --population and --successes");
      spec.population = *o.population;
      spec.successes = *o.successes;
    } else {
      throw InputError("simulate: the heterogeneous model needs --spec");
    }
    k = *o.k;
  }
  // Flags override a spec file's trials and seed only when given; the
  // defaults apply to derived specs.
  if (o.spec_path.empty()) {
    spec.trials = o.trials;
    spec.seed = o.seed;
  }
  return spec;
}

std::optional<Rational> exact_tail(const SimulationSpec& spec, std::uint64_t k) {
  if (spec.model == SimulationModel::Binomial) return binomial_upper_tail(BinomialParams{spec.draws, spec.p}, k);
  if (spec.model == SimulationModel::Hypergeometric) {
    return hypergeom_upper_tail(HypergeomParams{spec.population, spec.draws, spec.successes, k});
  }
  return std::nullopt;
}

std::string cmd_simulate(const Options& o, const CLI::App& cmd) {
  std::uint64_t k = 0;
  SimulationSpec spec = spec_from_flags(o, k);
  if (!o.spec_path.empty()) {
    if (cmd.count("--trials")) spec.trials = o.trials;
    if (cmd.count("--seed")) spec.seed = o.seed;
  }
  validate(spec);

  json extra = json::object();
  SimulationResult result;
  if (spec.model == SimulationModel::Heterogeneous) {
    const auto h = simulate_heterogeneous(spec.rates, spec.shifts, spec.suspect, k, spec.trials, spec.seed, o.workers);
    result = h.suspect;
    extra["any_nurse"] = to_json(h.any_nurse);
  } else {
    result = simulate_tail(spec, k, o.workers);
  }
  const auto exact = exact_tail(spec, k);
  if (!o.log_path.empty()) append_csv_log(o.log_path, spec.model, result, k);

  if (o.format == "json") {
    json j{{"spec", to_json(spec)}, {"k", k}, {"result", to_json(result)}};
    if (exact) {
      j["exact"] = probability_json(*exact);
      j["within_3se"] = agrees_with(result, to_double(*exact));
    }
    for (auto& [key, value] : extra.items()) j[key] = value;
    return j.dump(2) + "\n";
  }
  if (o.format == "csv") return csv_log_header() + "\n" + csv_log_line(spec.model, result, k) + "\n";

  std::ostringstream out;
  out << "Simulation: " << to_string(spec.model) << ", " << spec.trials << " trials, seed " << spec.seed << "\n";
  std::vector<std::vector<std::string>> rows{
      {"P(X >= " + std::to_string(k) + ")", format_sig(result.estimate)},
      {"standard error", format_sig(result.standard_error)},
      {"3-sigma interval", "[" + format_sig(result.interval.first) + ", " + format_sig(result.interval.second) + "]"}};
  if (exact) {
    rows.push_back({"exact", show(*exact)});
    rows.push_back({"within 3 se of exact", agrees_with(result, to_double(*exact)) ? "yes" : "no"});
  }
  if (extra.contains("any_nurse")) rows.push_back({"any nurse >= k", format_sig(extra["any_nurse"]["estimate"].get<double>())});
  out << align_columns(rows);
  return out.str();
}

std::string cmd_svg(const Options& o) {
  const Dataset d = resolve(o);
  Table2x2 pooled;
  const Table2x2& t = pick_table(d.table, o.stratum, pooled);
  const FigureModel figure = determinant_figure(t);
  if (o.format == "json") return to_json(figure).dump(2) + "\n";
  if (o.format == "csv") throw InputError("svg: csv output is not available (use text for SVG or json)");
  SvgOptions opts;
  opts.width_px = o.width;
  opts.height_px = o.height;
  opts.title = d.table.name() + " " + (o.stratum.empty() ? "pooled" : o.stratum);
  return render_svg(figure, opts);
}

std::string cmd_diff(const Options& o) {
  if (o.names.size() != 2) throw InputError("diff: expected two datasets (names or paths)");
  StratifiedTable from = resolve_name_or_path(o.names[0]);
  StratifiedTable to = resolve_name_or_path(o.names[1]);
  if (o.transpose) {
    from = from.transposed();
    to = to.transposed();
  }
  const DatasetDiff delta = diff(from, to);
  if (o.format == "json") return to_json(delta).dump(2) + "\n";

  auto signed_str = [](const BigInt& v) { return v > 0 ? "+" + v.str() : v.str(); };
  std::vector<std::vector<std::string>> rows;
  const auto& rl = from.row_labels();
  const auto& cl = from.col_labels();
  const std::vector<std::string> header{"stratum",
                                        rl[0] + "/" + cl[0],
                                        rl[0] + "/" + cl[1],
                                        rl[1] + "/" + cl[0],
                                        rl[1] + "/" + cl[1],
                                        "total"};
  if (o.format == "csv") {
    std::string out = csv_row({"stratum", "a", "b", "c", "d", "total"});
    for (const auto& s : delta.strata) {
      out += csv_row({s.label, s.cells[0].str(), s.cells[1].str(), s.cells[2].str(), s.cells[3].str(), s.total.str()});
    }
    return out;
  }
  rows.push_back(header);
  for (const auto& s : delta.strata) {
    rows.push_back({s.label, signed_str(s.cells[0]), signed_str(s.cells[1]), signed_str(s.cells[2]),
                    signed_str(s.cells[3]), signed_str(s.total)});
  }
  std::ostringstream out;
  out << "Changes from " << delta.from << " to " << delta.to << "\n" << align_columns(rows);
  out << "  suspect incidents " << signed_str(delta.suspect_incidents) << ", other incidents "
      << signed_str(delta.other_incidents) << ", incidents removed " << delta.incidents_removed << ", added "
      << delta.incidents_added << ", total shifts " << signed_str(delta.total) << "\n";
  return out.str();
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw InputError(o.out + ": cannot open for writing");
  file << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact inference and confounding audits on stratified 2x2 tables", "ctaudit"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "Correlations, one-in-N, rates, Simpson check and binomial model");
  add_source(analyze, o);
  add_output(analyze, o);
  analyze->add_option("--nurses", o.nurses, "Post-hoc correction factor");
  analyze->add_option("--tau", o.tau, "Threshold for the first k with tail below it (default 0.05)");

  auto* fisher = app.add_subcommand("fisher", "One-sided Fisher tails with post-hoc correction");
  add_source(fisher, o);
  add_output(fisher, o);
  fisher->add_option("--nurses", o.nurses, "Post-hoc correction factor");
  fisher->add_option("--mode", o.mode, "stratified or collapsed")->check(CLI::IsMember({"stratified", "collapsed"}));

  auto* binomial = app.add_subcommand("binomial", "Binomial tail table for row 1 at row 2's rate");
  add_source(binomial, o);
  add_output(binomial, o);
  binomial->add_option("--stratum", o.stratum, "Stratum label (default: pooled table)");
  binomial->add_option("--kmin", o.k_min, "Smallest threshold");
  binomial->add_option("--kmax", o.k_max, "Largest threshold");
  binomial->add_option("--tau", o.tau, "Threshold for the first k with tail below it (default 0.05)");

  auto* simpson = app.add_subcommand("simpson", "Odds-ratio reversal check");
  add_source(simpson, o);
  add_output(simpson, o);

  auto* repl = app.add_subcommand("replicate", "Recompute the embedded analyses and compare with stored references");
  repl->add_option("names", o.names, "Datasets (default: all embedded)");
  repl->add_option("--input", o.inputs, "Replacement dataset, matched by its name");
  repl->add_option("--tau", o.tau, "Threshold for the first k with tail below it (default 0.05)");
  add_output(repl, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tail estimate");
  add_source(simulate, o);
  add_output(simulate, o);
  simulate->add_option("--model", o.model, "binomial, hypergeometric or heterogeneous")
      ->check(CLI::IsMember({"binomial", "hypergeometric", "heterogeneous"}));
  simulate->add_option("--spec", o.spec_path, "Simulation spec JSON");
  simulate->add_option("--stratum", o.stratum, "Stratum label (default: pooled table)");
  simulate->add_option("--k", o.k, "Threshold (default: observed row 1 count)");
  simulate->add_option("--draws", o.draws, "Draws per trial");
  simulate->add_option("--p", o.p, "Binomial rate, e.g. 14/1531");
  simulate->add_option("--population", o.population, "Hypergeometric population");
  simulate->add_option("--successes", o.successes, "Hypergeometric successes in the population");
  simulate->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed, "64-bit seed");
  simulate->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
  simulate->add_option("--log", o.log_path, "Append a CSV line to PATH");

  auto* svg = app.add_subcommand("svg", "SVG of the determinant picture");
  add_source(svg, o);
  add_output(svg, o);
  svg->add_option("--stratum", o.stratum, "Stratum label (default: pooled table)");
  svg->add_option("--width", o.width, "Width in pixels");
  svg->add_option("--height", o.height, "Height in pixels");

  auto* diff_cmd = app.add_subcommand("diff", "Cell changes between two datasets");
  diff_cmd->add_option("datasets", o.names, "Two embedded names or paths")->expected(2);
  diff_cmd->add_flag("--transpose", o.transpose, "Swap rows and columns of every stratum");
  add_output(diff_cmd, o);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    bool mismatch = false;
    std::string text;
    if (*analyze) text = cmd_analyze(o);
    else if (*fisher) text = cmd_fisher(o);
    else if (*binomial) text = cmd_binomial(o);
    else if (*simpson) text = cmd_simpson(o);
    else if (*repl) text = cmd_replicate(o, mismatch);
    else if (*simulate) text = cmd_simulate(o, *simulate);
    else if (*svg) text = cmd_svg(o);
    else text = cmd_diff(o);
    emit(o, text, out);
    if (mismatch) {
      err << "ctaudit: replicate: reproduced values differ from the reference\n";
      return kExitMismatch;
    }
    return kExitOk;
  } catch (const InputError& e) {
    err << "ctaudit: error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "ctaudit: invalid: " << e.what() << "\n";
    return kExitAnalysis;
  } catch (const std::exception& e) {
    err << "ctaudit: analysis failed: " << e.what() << "\n";
    return kExitAnalysis;
  }
}

}  // namespace ctaudit
