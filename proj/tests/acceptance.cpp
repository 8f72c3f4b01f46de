// Acceptance suite: one PASS/FAIL line per criterion. Published numbers
// are transcribed here directly; [derived] values come from oracle.hpp.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctaudit/cli.hpp"
#include "ctaudit/pipeline.hpp"
#include "ctaudit/simulate.hpp"
#include "oracle.hpp"

using namespace ctaudit;
using nlohmann::json;

namespace {

constexpr double kRelTol = 1e-4;  // against 6-significant-figure printed values
constexpr std::uint64_t kMcTrials = 1'000'000;
constexpr double kMcSeconds = 30.0;
constexpr double kCorrelationSeconds = 1.0;

// Printed values.
constexpr double kPooledCorrOriginal = 0.158169;
constexpr double kPooledCorrDerksen = 0.0614621;
const std::vector<double> kTailsOriginal{1.10572e-7, 0.0136612, 0.0715592};
const std::vector<double> kTailsDerksen{0.00155956, 0.0405357, 0.851093};
constexpr double kOneInNOriginalStrat = 3.42638e8;
constexpr double kOneInNOriginalColl = 141494;
constexpr double kOneInNDerksenStrat = 688.367;
constexpr double kOneInNDerksenColl = 1.64051;
const std::vector<double> kBinomOriginal{0.24363,     0.0930338,    0.0292779,   0.00779387, 0.00179153,
                                         0.00036146,  0.0000648622, 0.0000104641, 1.5314e-6,  2.04843e-7,
                                         2.52053e-8,  2.86883e-9,   3.03491e-10};  // k = 3..15
const std::vector<double> kBinomDerksen{0.284318, 0.117044, 0.0398576, 0.0115067,
                                        0.00287253, 0.000630018, 0.000122978};  // k = 3..9
constexpr double kBinomOneInNOriginal = 3.48574e8;
constexpr double kBinomOneInNDerksen = 86.9055;
// Rate table rows: {V, Other} per stratum JKZ, RKZ1, RKZ2.
const std::vector<std::array<double, 2>> kRatesOriginal{{0.056338, 0.0}, {1.0, 0.0109589}, {0.0862069, 0.0320285}};
const std::vector<std::array<double, 2>> kRatesDerksen{{0.028169, 0.0011274}, {0.333333, 0.0110193}, {0.0172414, 0.0320285}};
constexpr double kP0Original = 0.0084801;
constexpr double kP0Derksen = 0.00914435;
constexpr double kP1Original = 0.0696517;
constexpr double kP1Derksen = 0.0295567;

class Failures {
 public:
  void close(const std::string& what, double actual, double expected, double tol = kRelTol) {
    const bool ok = expected == 0.0 ? actual == 0.0 : std::abs(actual - expected) <= tol * std::abs(expected);
    if (!ok) add(what + ": got " + fmt(actual) + ", expected " + fmt(expected));
    ++checked_;
  }
  void require(const std::string& what, bool ok) {
    if (!ok) add(what);
    ++checked_;
  }
  void add(std::string msg) { list_.push_back(std::move(msg)); }
  bool empty() const { return list_.empty(); }
  const std::vector<std::string>& list() const { return list_; }
  int checked() const { return checked_; }

 private:
  static std::string fmt(double v) {
    std::ostringstream s;
    s.precision(9);
    s << v;
    return s.str();
  }
  std::vector<std::string> list_;
  int checked_ = 0;
};

const StratifiedTable& table(const char* name) { return embedded_dataset(name).table; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Correlation overview
void criterion1(Failures& f) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto orig = nominal_correlation(collapse(table("original")));
  const auto ders = nominal_correlation(collapse(table("derksen")));
  const auto shops = nominal_correlation(collapse(table("shops")));
  const double elapsed = seconds_since(t0);
  f.close("original pooled", orig.value, kPooledCorrOriginal);
  f.close("derksen pooled", ders.value, kPooledCorrDerksen);
  f.require("shops pooled squared == 1/64", shops.value_squared == Rational(1, 64));
  f.require("shops pooled sign negative", shops.det < 0);
  f.require("shops pooled == -0.125", shops.value == -0.125);
  for (const char* name : {"original", "derksen", "shops"}) {
    const Table2x2 t = collapse(table(name));
    const double expect = static_cast<double>(
        oracle::correlation(to_double(t.a()), to_double(t.b()), to_double(t.c()), to_double(t.d())));
    f.close(std::string(name) + " pooled vs oracle", nominal_correlation(t).value, expect, 1e-12);
  }
  f.require("runtime < 1 s", elapsed < kCorrelationSeconds);
}

// 2. Odds ratios and the Simpson verdict
void criterion2(Failures& f) {
  const auto v = simpson_check(table("shops"));
  f.require("two shop strata", v.strata.size() == 2);
  for (const auto& s : v.strata) f.require(s.label + " OR == 5/4", s.odds_ratio.is_finite() && s.odds_ratio.value() == Rational(5, 4));
  f.require("pooled OR == 49/81", v.pooled.is_finite() && v.pooled.value() == Rational(49, 81));
  f.require("paradox == true", v.paradox);
}

// 3. Fisher per-stratum tails
void criterion3(Failures& f) {
  auto run = [&](const char* name, const std::vector<double>& printed) {
    const auto& strata = table(name).strata();
    for (std::size_t i = 0; i < strata.size(); ++i) {
      const Rational tail = fisher_upper_tail(strata[i].table);
      f.close(std::string(name) + " " + strata[i].label, to_double(tail), printed[i]);
      f.require(std::string(name) + " " + strata[i].label + " == oracle", tail == oracle::fisher_upper(strata[i].table));
    }
  };
  run("original", kTailsOriginal);
  run("derksen", kTailsDerksen);
  f.require("original RKZ1 == 5/366", fisher_upper_tail(table("original").at("RKZ1").table) == Rational(5, 366));
}

// 4. One-in-N overview with 27 nurses
void criterion4(Failures& f) {
  auto one_in_n = [](const char* name, PipelineMode mode) {
    return to_double(fisher_pipeline(table(name), 27, mode).one_in_n);
  };
  f.close("original stratified", one_in_n("original", PipelineMode::Stratified), kOneInNOriginalStrat);
  f.close("original collapsed", one_in_n("original", PipelineMode::Collapsed), kOneInNOriginalColl);
  f.close("derksen stratified", one_in_n("derksen", PipelineMode::Stratified), kOneInNDerksenStrat);
  f.close("derksen collapsed", one_in_n("derksen", PipelineMode::Collapsed), kOneInNDerksenColl);
}

// 5. Binomial tail tables
void criterion5(Failures& f) {
  auto run = [&](const char* label, unsigned n, Rational p, const std::vector<double>& printed, unsigned k_obs,
                 double one_in_n) {
    const TailTable t = tail_table({n, p}, 3, 3 + printed.size() - 1);
    for (std::size_t i = 0; i < printed.size(); ++i) {
      const unsigned k = 3 + static_cast<unsigned>(i);
      f.close(std::string(label) + " P(X>=" + std::to_string(k) + ")", t.rows[i].value, printed[i]);
      f.require(std::string(label) + " k=" + std::to_string(k) + " == oracle",
                t.rows[i].probability == oracle::binomial_upper(n, p, k));
    }
    f.close(std::string(label) + " one-in-N", to_double(1 / binomial_upper_tail({n, p}, k_obs)), one_in_n);
  };
  run("n=201 p=13/1533", 201, Rational(13, 1533), kBinomOriginal, 14, kBinomOneInNOriginal);
  run("n=203 p=14/1531", 203, Rational(14, 1531), kBinomDerksen, 6, kBinomOneInNDerksen);

  // Same values reached from the tables themselves.
  const auto o = binomial_analysis(collapse(table("original")), std::nullopt, kDefaultTau);
  f.require("original pooled gives n=201 p0=13/1533 k=14", o.n == 201 && o.p0 == Rational(13, 1533) && o.k_obs == 14);
  const auto d = binomial_analysis(collapse(table("derksen")), std::nullopt, kDefaultTau);
  f.require("derksen pooled gives n=203 p0=14/1531 k=6", d.n == 203 && d.p0 == Rational(14, 1531) && d.k_obs == 6);
}

// 6. Rate table
void criterion6(Failures& f) {
  const std::vector<StratifiedTable> ds{table("original"), table("derksen")};
  const RateTable rates = rate_table(ds);
  auto rows = [&](const char* name, const std::vector<std::array<double, 2>>& printed) {
    const auto& strata = table(name).strata();
    for (std::size_t i = 0; i < strata.size(); ++i) {
      const auto& e = rates.at(name, strata[i].label);
      f.close(std::string(name) + " " + strata[i].label + " V", e.suspect.as_double(), printed[i][0]);
      f.close(std::string(name) + " " + strata[i].label + " Other", e.other.as_double(), printed[i][1]);
    }
  };
  rows("original", kRatesOriginal);
  rows("derksen", kRatesDerksen);
  f.close("original p0", rates.pooled_for("original").p0.as_double(), kP0Original);
  f.close("derksen p0", rates.pooled_for("derksen").p0.as_double(), kP0Derksen);
  f.close("original p1", rates.pooled_for("original").p1.as_double(), kP1Original);
  f.close("derksen p1", rates.pooled_for("derksen").p1.as_double(), kP1Derksen);
}

// 7. Property suites
void criterion7(Failures& f) {
  // pmf normalization over (n, r, k) with n <= 200
  int grids = 0;
  for (int n = 0; n <= 200; n += (n < 30 ? 1 : 10)) {
    for (int r = 0; r <= n; r += std::max(1, n / 8)) {
      for (int k = 0; k <= n; k += std::max(1, n / 8)) {
        const Support s = hypergeom_support(n, r, k);
        Rational sum = 0;
        Rational prev = 2;
        for (Count x = s.lo; x <= s.hi; ++x) {
          sum += hypergeom_pmf({n, r, k, x});
          const Rational tail = hypergeom_upper_tail({n, r, k, x});
          if (tail > prev) f.add("hypergeom tail not monotone at n=" + std::to_string(n));
          prev = tail;
        }
        if (sum != 1) f.add("pmf sum != 1 at n=" + std::to_string(n) + " r=" + std::to_string(r) + " k=" + std::to_string(k));
        ++grids;
      }
    }
  }
  f.require("grid covered", grids > 1000);

  for (unsigned n : {10u, 57u, 200u}) {
    for (const Rational& p : {Rational(1, 7), Rational(13, 1533), Rational(9, 10)}) {
      Rational prev = 2;
      for (unsigned k = 0; k <= n + 1; ++k) {
        const Rational tail = binomial_upper_tail({n, p}, k);
        if (tail > prev) f.add("binomial tail not monotone at n=" + std::to_string(n));
        prev = tail;
      }
    }
  }

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> scale(1, 12);
  for (int i = 0; i < 2000; ++i) {
    const Table2x2 t = oracle::random_table(rng, i % 3 == 0 ? 6 : 3000);
    const auto r = nominal_correlation(t);
    const auto u = nominal_correlation(t.transposed());
    if (r.value < -1.0 || r.value > 1.0) f.add("correlation out of bounds");
    if (u.value != r.value) f.add("correlation not transpose invariant");
    if (r.value_squared != r.exact_row_ratio * r.exact_col_ratio) f.add("value^2 != product of orientation ratios");
    const int a = scale(rng), b = scale(rng);
    const OddsRatio base = odds_ratio(t);
    if (odds_ratio(Table2x2(t.a() * a, t.b() * a, t.c(), t.d())) != base ||
        odds_ratio(Table2x2(t.a(), t.b(), t.c() * a, t.d() * a)) != base ||
        odds_ratio(Table2x2(t.a() * b, t.b(), t.c() * b, t.d())) != base ||
        odds_ratio(Table2x2(t.a(), t.b() * b, t.c(), t.d() * b)) != base) {
      f.add("odds ratio not scaling invariant");
    }
  }

  for (int i = 0; i < 1000; ++i) {
    const StratifiedTable s = oracle::random_stratified(rng, 6, 800);
    const Table2x2 pooled = collapse(s);
    Margins sum{0, 0, 0, 0, 0};
    for (const auto& st : s.strata()) {
      const Margins m = st.table.margins();
      sum.row1 += m.row1;
      sum.row2 += m.row2;
      sum.col1 += m.col1;
      sum.col2 += m.col2;
      sum.total += m.total;
    }
    if (pooled.margins() != sum) f.add("collapse margins inconsistent");
  }
  f.require("no property violations", f.empty());
}

// 8. Monte Carlo cross-validation
void criterion8(Failures& f) {
  const auto t0 = std::chrono::steady_clock::now();

  SimulationSpec bin;
  bin.model = SimulationModel::Binomial;
  bin.draws = 203;
  bin.p = Rational(14, 1531);
  bin.trials = kMcTrials;
  bin.seed = 20070101;
  const auto b1 = simulate_tail(bin, 6);
  const double bin_exact = to_double(binomial_upper_tail({203, bin.p}, 6));
  f.close("binomial exact oracle", bin_exact, 0.0115067);
  f.require("binomial within 3 se of exact", agrees_with(b1, bin_exact));

  SimulationSpec hyp;
  hyp.model = SimulationModel::Hypergeometric;
  hyp.population = 339;
  hyp.draws = 58;
  hyp.successes = 14;
  hyp.trials = kMcTrials;
  hyp.seed = 20070101;
  const auto h1 = simulate_tail(hyp, 5);
  const double hyp_exact = to_double(hypergeom_upper_tail({339, 58, 14, 5}));
  f.close("hypergeometric exact oracle", hyp_exact, 0.0715592);
  f.require("hypergeometric within 3 se of exact", agrees_with(h1, hyp_exact));

  const auto b2 = simulate_tail(bin, 6, 1);
  const auto h2 = simulate_tail(hyp, 5, 4);
  f.require("binomial deterministic", b1.hits == b2.hits);
  f.require("hypergeometric deterministic", h1.hits == h2.hits);

  const double elapsed = seconds_since(t0);
  f.require("runtime < 30 s (took " + std::to_string(elapsed) + " s)", elapsed < kMcSeconds);
  std::cout << "    binomial " << b1.estimate << " +/- " << b1.standard_error << " (exact " << bin_exact
            << "); hypergeometric " << h1.estimate << " +/- " << h1.standard_error << " (exact " << hyp_exact
            << "); " << elapsed << " s\n";
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

const json* find_by(const json& arr, const char* key, const std::string& value) {
  for (const auto& e : arr) {
    if (e.contains(key) && e[key] == value) return &e;
  }
  return nullptr;
}

// 9. replicate: exit 0, JSON carries criteria 1-6, one-count mutations exit 4
void criterion9(Failures& f) {
  std::string out;
  f.require("replicate exits 0", cli({"replicate", "--format", "json"}, &out) == 0);
  json j;
  try {
    j = json::parse(out);
  } catch (const std::exception& e) {
    f.add(std::string("replicate JSON unparsable: ") + e.what());
    return;
  }
  auto num = [&](const std::string& what, const json* node, const char* key) -> double {
    if (!node || !node->contains(key) || !(*node)[key].is_number()) {
      f.add(what + ": missing in JSON");
      return NAN;
    }
    return (*node)[key].get<double>();
  };
  auto section = [&](const char* name, const std::string& dataset) { return find_by(j[name], "dataset", dataset); };

  // 1
  const json* co = section("correlation_overview", "original");
  f.close("json original pooled", num("original pooled", co ? &(*co)["pooled"] : nullptr, "value"), kPooledCorrOriginal);
  const json* cd = section("correlation_overview", "derksen");
  f.close("json derksen pooled", num("derksen pooled", cd ? &(*cd)["pooled"] : nullptr, "value"), kPooledCorrDerksen);
  const json* cs = section("correlation_overview", "shops");
  f.require("json shops pooled -0.125 with square 1/64",
            cs && (*cs)["pooled"]["display"] == "-0.125" && (*cs)["pooled"]["value_squared"]["exact"] == "1/64");
  // 2
  const json* ss = section("simpson", "shops");
  f.require("json shops odds ratios 5/4, 5/4, 49/81, paradox",
            ss && (*ss)["strata"][0]["odds_ratio"]["text"] == "5/4" && (*ss)["strata"][1]["odds_ratio"]["text"] == "5/4" &&
                (*ss)["pooled"]["odds_ratio"]["text"] == "49/81" && (*ss)["paradox"] == true);
  // 3, 4
  auto fisher = [&](const char* name, const std::vector<double>& tails, double strat, double coll) {
    const json* row = section("one_in_n_overview", name);
    if (!row) {
      f.add(std::string("json one-in-N row missing for ") + name);
      return;
    }
    const auto& strata = (*row)["not_summed"]["strata"];
    for (std::size_t i = 0; i < tails.size() && i < strata.size(); ++i) {
      f.close(std::string("json ") + name + " tail " + std::to_string(i), num("tail", &strata[i]["p"], "value"), tails[i]);
    }
    f.close(std::string("json ") + name + " stratified one-in-N", num("one-in-N", &(*row)["not_summed"]["one_in_n"], "value"), strat);
    f.close(std::string("json ") + name + " collapsed one-in-N", num("one-in-N", &(*row)["summed"]["one_in_n"], "value"), coll);
  };
  fisher("original", kTailsOriginal, kOneInNOriginalStrat, kOneInNOriginalColl);
  fisher("derksen", kTailsDerksen, kOneInNDerksenStrat, kOneInNDerksenColl);
  const json* oo = section("one_in_n_overview", "original");
  f.require("json original RKZ1 exact 5/366", oo && (*oo)["not_summed"]["strata"][1]["p"]["exact"] == "5/366");
  // 5
  auto binom = [&](const char* name, const std::vector<double>& printed, double one_in_n) {
    const json* b = section("binomial", name);
    if (!b) {
      f.add(std::string("json binomial missing for ") + name);
      return;
    }
    for (std::size_t i = 0; i < printed.size(); ++i) {
      const json* row = find_by((*b)["tail"], "k", std::to_string(3 + i));
      f.close(std::string("json ") + name + " P(X>=" + std::to_string(3 + i) + ")",
              num("tail row", row ? &(*row)["p_ge_k"] : nullptr, "value"), printed[i]);
    }
    f.close(std::string("json ") + name + " binomial one-in-N", num("one-in-N", &(*b)["one_in_n"], "value"), one_in_n);
  };
  binom("original", kBinomOriginal, kBinomOneInNOriginal);
  binom("derksen", kBinomDerksen, kBinomOneInNDerksen);
  // 6
  const json& rt = j["rate_table"];
  auto rates = [&](const char* name, const std::vector<std::array<double, 2>>& printed) {
    int i = 0;
    for (const auto& e : rt["entries"]) {
      if (e["dataset"] != name) continue;
      f.close(std::string("json rate ") + name + " V", num("rate", &e["suspect"]["rate"], "value"), printed[i][0]);
      f.close(std::string("json rate ") + name + " Other", num("rate", &e["other"]["rate"], "value"), printed[i][1]);
      ++i;
    }
    f.require(std::string("json rate rows for ") + name, i == 3);
    const json* p = find_by(rt["pooled"], "dataset", name);
    return p;
  };
  const json* po = rates("original", kRatesOriginal);
  const json* pd = rates("derksen", kRatesDerksen);
  f.close("json p0 original", num("p0", po ? &(*po)["p0"]["rate"] : nullptr, "value"), kP0Original);
  f.close("json p0 derksen", num("p0", pd ? &(*pd)["p0"]["rate"] : nullptr, "value"), kP0Derksen);
  f.close("json p1 original", num("p1", po ? &(*po)["p1"]["rate"] : nullptr, "value"), kP1Original);
  f.close("json p1 derksen", num("p1", pd ? &(*pd)["p1"]["rate"] : nullptr, "value"), kP1Derksen);
  f.require("json all_checks_passed", j["all_checks_passed"] == true);

  // Every embedded count, +1 and -1 where possible.
  const auto path = std::filesystem::temp_directory_path() / "ctaudit_acceptance_mutant.json";
  int mutants = 0, flipped = 0;
  for (const auto& name : embedded_names()) {
    const json base = to_json(embedded_dataset(name).table);
    for (std::size_t s = 0; s < base["strata"].size(); ++s) {
      for (int cell = 0; cell < 4; ++cell) {
        for (int delta : {+1, -1}) {
          json mutant = base;
          auto& count = mutant["strata"][s]["counts"][cell / 2][cell % 2];
          const long long value = count.is_string() ? std::stoll(count.get<std::string>()) : count.get<long long>();
          if (value + delta < 0) continue;
          count = value + delta;
          std::ofstream(path) << mutant.dump();
          ++mutants;
          const int code = cli({"replicate", name, "--input", path.string(), "--format", "json"});
          if (code == kExitMismatch) {
            ++flipped;
          } else {
            f.add("mutant " + name + " stratum " + std::to_string(s) + " cell " + std::to_string(cell) + " delta " +
                  std::to_string(delta) + " exit " + std::to_string(code));
          }
        }
      }
    }
  }
  std::filesystem::remove(path);
  std::cout << "    " << flipped << "/" << mutants << " single-count mutations exit 4\n";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Failures&)>>> criteria{
      {"correlation overview", criterion1}, {"odds ratios and Simpson verdict", criterion2},
      {"Fisher per-stratum tails", criterion3}, {"one-in-N overview", criterion4},
      {"binomial tail tables", criterion5},  {"rate table", criterion6},
      {"property suites", criterion7},       {"Monte Carlo cross-validation", criterion8},
      {"replicate self-check", criterion9}};

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Failures f;
    try {
      criteria[i].second(f);
    } catch (const std::exception& e) {
      f.add(std::string("exception: ") + e.what());
    }
    const bool pass = f.empty();
    failed += !pass;
    std::cout << "criterion " << i + 1 << ": " << (pass ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
              << f.checked() << " checks)\n";
    for (const auto& msg : f.list()) std::cout << "    " << msg << "\n";
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria passed\n");
  return failed ? 1 : 0;
}
