#include "ctaudit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "ctaudit/error.hpp"
#include "ctaudit/rng.hpp"

namespace ctaudit {

namespace mp = boost::multiprecision;
using nlohmann::json;

namespace {

// Exact Bernoulli draw: uniform integer in [0, den) compared with num.
struct Bernoulli {
  std::uint64_t num;
  std::uint64_t den;

  explicit Bernoulli(const Rational& p)
      : num(mp::numerator(p).convert_to<std::uint64_t>()), den(mp::denominator(p).convert_to<std::uint64_t>()) {}

  bool operator()(Xoshiro256& rng) const { return num != 0 && rng.below(den) < num; }
};

void check_rate(const Rational& p, const std::string& what) {
  if (p < 0 || p > 1) throw ValidationError(what + " = " + to_fraction_string(p) + " outside [0,1]");
  if (mp::denominator(p) > std::numeric_limits<std::uint64_t>::max()) {
    throw ValidationError(what + " = " + to_fraction_string(p) + " has a denominator beyond 64 bits");
  }
}

SimulationResult finish(std::uint64_t hits, std::uint64_t trials, std::uint64_t seed) {
  SimulationResult r;
  r.hits = hits;
  r.trials = trials;
  r.seed = seed;
  r.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  r.standard_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
  r.interval = {std::max(0.0, r.estimate - 3.0 * r.standard_error), std::min(1.0, r.estimate + 3.0 * r.standard_error)};
  return r;
}

// Runs `run_chunk(rng, first_trial, count, hits...)` over all chunks and
// sums the per-chunk hit counters. `Hits` is an array of counters.
template <std::size_t N, typename ChunkFn>
std::array<std::uint64_t, N> run_chunks(std::uint64_t trials, std::uint64_t seed, unsigned workers,
                                        const ChunkFn& run_chunk) {
  const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<Xoshiro256> streams;
  streams.reserve(chunks);
  Xoshiro256 rng(seed);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    streams.push_back(rng);
    rng.jump();
  }

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));

  std::vector<std::array<std::uint64_t, N>> per_worker(workers, std::array<std::uint64_t, N>{});
  auto work = [&](unsigned w) {
    for (std::uint64_t c = w; c < chunks; c += workers) {
      const std::uint64_t count = std::min(kChunkTrials, trials - c * kChunkTrials);
      run_chunk(streams[c], count, per_worker[w]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  std::array<std::uint64_t, N> total{};
  for (const auto& counts : per_worker) {
    for (std::size_t i = 0; i < N; ++i) total[i] += counts[i];
  }
  return total;
}

}  // namespace

std::string to_string(SimulationModel model) {
  switch (model) {
    case SimulationModel::Binomial:
      return "binomial";
    case SimulationModel::Hypergeometric:
      return "hypergeometric";
    case SimulationModel::Heterogeneous:
      break;
  }
  return "heterogeneous";
}

SimulationModel parse_model(std::string_view text) {
  if (text == "binomial") return SimulationModel::Binomial;
  if (text == "hypergeometric") return SimulationModel::Hypergeometric;
  if (text == "heterogeneous") return SimulationModel::Heterogeneous;
  throw InputError("unknown model '" + std::string(text) + "' (expected binomial, hypergeometric or heterogeneous)");
}

void validate(const SimulationSpec& spec) {
  if (spec.trials == 0) throw ValidationError("simulation needs at least one trial");
  switch (spec.model) {
    case SimulationModel::Binomial:
      check_rate(spec.p, "p");
      break;
    case SimulationModel::Hypergeometric:
      if (spec.draws > spec.population || spec.successes > spec.population) {
        throw ValidationError("hypergeometric simulation needs draws <= population and successes <= population");
      }
      break;
    case SimulationModel::Heterogeneous:
      if (spec.rates.size() != spec.shifts.size()) {
        throw ValidationError("heterogeneous simulation: " + std::to_string(spec.rates.size()) + " rates but " +
                              std::to_string(spec.shifts.size()) + " shift counts");
      }
      if (spec.suspect >= spec.rates.size()) {
        throw ValidationError("heterogeneous simulation: suspect index " + std::to_string(spec.suspect) +
                              " out of range");
      }
      for (std::size_t i = 0; i < spec.rates.size(); ++i) check_rate(spec.rates[i], "rate[" + std::to_string(i) + "]");
      break;
  }
}

SimulationResult simulate_tail(const SimulationSpec& spec, std::uint64_t k, unsigned workers) {
  validate(spec);
  switch (spec.model) {
    case SimulationModel::Binomial: {
      if (k > spec.draws + 1) throw DomainError("threshold " + std::to_string(k) + " beyond draws + 1");
      const Bernoulli incident(spec.p);
      const auto hits = run_chunks<1>(spec.trials, spec.seed, workers,
                                      [&](Xoshiro256& rng, std::uint64_t count, std::array<std::uint64_t, 1>& out) {
                                        for (std::uint64_t t = 0; t < count; ++t) {
                                          std::uint64_t incidents = 0;
                                          for (std::uint64_t s = 0; s < spec.draws; ++s) incidents += incident(rng);
                                          out[0] += incidents >= k;
                                        }
                                      });
      return finish(hits[0], spec.trials, spec.seed);
    }
    case SimulationModel::Hypergeometric: {
      if (k > std::min(spec.draws, spec.successes) + 1) {
        throw DomainError("threshold " + std::to_string(k) + " beyond the support");
      }
      const auto hits = run_chunks<1>(spec.trials, spec.seed, workers,
                                      [&](Xoshiro256& rng, std::uint64_t count, std::array<std::uint64_t, 1>& out) {
                                        // Roster of shifts; the first `successes` carry an incident.
                                        std::vector<std::uint8_t> roster(spec.population, 0);
                                        std::fill_n(roster.begin(), spec.successes, 1);
                                        for (std::uint64_t t = 0; t < count; ++t) {
                                          std::uint64_t incidents = 0;
                                          // Partial Fisher-Yates: positions 0..draws-1 form a uniform sample.
                                          for (std::uint64_t j = 0; j < spec.draws; ++j) {
                                            const std::uint64_t pick = j + rng.below(spec.population - j);
                                            std::swap(roster[j], roster[pick]);
                                            incidents += roster[j];
                                          }
                                          out[0] += incidents >= k;
                                        }
                                      });
      return finish(hits[0], spec.trials, spec.seed);
    }
    case SimulationModel::Heterogeneous:
      break;
  }
  return simulate_heterogeneous(spec.rates, spec.shifts, spec.suspect, k, spec.trials, spec.seed, workers).suspect;
}

HeterogeneousResult simulate_heterogeneous(std::span<const Rational> rates, std::span<const std::uint64_t> shifts,
                                           std::size_t suspect, std::uint64_t k, std::uint64_t trials,
                                           std::uint64_t seed, unsigned workers) {
  SimulationSpec spec;
  spec.model = SimulationModel::Heterogeneous;
  spec.rates.assign(rates.begin(), rates.end());
  spec.shifts.assign(shifts.begin(), shifts.end());
  spec.suspect = suspect;
  spec.trials = trials;
  spec.seed = seed;
  validate(spec);

  std::vector<Bernoulli> incident;
  for (const auto& p : spec.rates) incident.emplace_back(p);

  const auto hits = run_chunks<2>(trials, seed, workers,
                                  [&](Xoshiro256& rng, std::uint64_t count, std::array<std::uint64_t, 2>& out) {
                                    for (std::uint64_t t = 0; t < count; ++t) {
                                      bool suspect_hit = false;
                                      bool any_hit = false;
                                      for (std::size_t i = 0; i < incident.size(); ++i) {
                                        std::uint64_t incidents = 0;
                                        for (std::uint64_t s = 0; s < spec.shifts[i]; ++s) incidents += incident[i](rng);
                                        const bool hit = incidents >= k;
                                        any_hit = any_hit || hit;
                                        if (i == suspect) suspect_hit = hit;
                                      }
                                      out[0] += suspect_hit;
                                      out[1] += any_hit;
                                    }
                                  });
  return {finish(hits[0], trials, seed), finish(hits[1], trials, seed)};
}

bool agrees_with(const SimulationResult& result, double exact, double sigmas) {
  const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(result.trials));
  return std::abs(result.estimate - exact) <= sigmas * se;
}

json to_json(const SimulationSpec& spec) {
  json out{{"model", to_string(spec.model)}, {"trials", spec.trials}, {"seed", spec.seed}};
  switch (spec.model) {
    case SimulationModel::Binomial:
      out["draws"] = spec.draws;
      out["p"] = to_fraction_string(spec.p);
      break;
    case SimulationModel::Hypergeometric:
      out["population"] = spec.population;
      out["draws"] = spec.draws;
      out["successes"] = spec.successes;
      break;
    case SimulationModel::Heterogeneous: {
      json rates = json::array();
      for (const auto& r : spec.rates) rates.push_back(to_fraction_string(r));
      out["rates"] = rates;
      out["shifts"] = spec.shifts;
      out["suspect"] = spec.suspect;
      break;
    }
  }
  return out;
}

SimulationSpec simulation_spec_from_json(const json& j) {
  auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw InputError(std::string("simulation spec: missing \"") + key + "\"");
    return j.at(key);
  };
  auto unsigned_field = [&](const char* key) {
    const json& v = field(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw InputError(std::string("simulation spec: \"") + key + "\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };
  auto rational_field = [&](const json& v, const std::string& key) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) return parse_rational(v.dump());
    throw InputError("simulation spec: \"" + key + "\" must be a number or a \"p/q\" string");
  };

  if (!j.is_object()) throw InputError("simulation spec must be a JSON object");
  if (!field("model").is_string()) throw InputError("simulation spec: \"model\" must be a string");
  SimulationSpec spec;
  spec.model = parse_model(field("model").get<std::string>());
  spec.trials = unsigned_field("trials");
  spec.seed = unsigned_field("seed");
  switch (spec.model) {
    case SimulationModel::Binomial:
      spec.draws = unsigned_field("draws");
      spec.p = rational_field(field("p"), "p");
      break;
    case SimulationModel::Hypergeometric:
      spec.population = unsigned_field("population");
      spec.draws = unsigned_field("draws");
      spec.successes = unsigned_field("successes");
      break;
    case SimulationModel::Heterogeneous:
      if (!field("rates").is_array() || !field("shifts").is_array()) {
        throw InputError("simulation spec: \"rates\" and \"shifts\" must be arrays");
      }
      for (std::size_t i = 0; i < j["rates"].size(); ++i) {
        spec.rates.push_back(rational_field(j["rates"][i], "rates[" + std::to_string(i) + "]"));
      }
      for (const auto& s : j["shifts"]) {
        if (!s.is_number_unsigned()) throw InputError("simulation spec: \"shifts\" must hold non-negative integers");
        spec.shifts.push_back(s.get<std::uint64_t>());
      }
      spec.suspect = unsigned_field("suspect");
      break;
  }
  return spec;
}

json to_json(const SimulationResult& r) {
  return {{"hits", r.hits},
          {"trials", r.trials},
          {"seed", r.seed},
          {"estimate", r.estimate},
          {"stderr", r.standard_error},
          {"interval_3sigma", {r.interval.first, r.interval.second}}};
}

std::string csv_log_header() { return "model,seed,trials,k,estimate,stderr"; }

std::string csv_log_line(SimulationModel model, const SimulationResult& r, std::uint64_t k) {
  return to_string(model) + "," + std::to_string(r.seed) + "," + std::to_string(r.trials) + "," + std::to_string(k) +
         "," + format_sig(r.estimate, 17) + "," + format_sig(r.standard_error, 17);
}

void append_csv_log(const std::filesystem::path& path, SimulationModel model, const SimulationResult& r,
                    std::uint64_t k) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw InputError(path.string() + ": cannot open log for appending");
  if (fresh) out << csv_log_header() << '\n';
  out << csv_log_line(model, r, k) << '\n';
}

}  // namespace ctaudit
