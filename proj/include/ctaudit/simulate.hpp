#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctaudit/rational.hpp"

namespace ctaudit {

enum class SimulationModel { Binomial, Hypergeometric, Heterogeneous };

std::string to_string(SimulationModel model);
/// Throws InputError for an unknown name.
SimulationModel parse_model(std::string_view text);

struct SimulationSpec {
  SimulationModel model = SimulationModel::Binomial;

  // Binomial: `draws` shifts, each an incident with probability `p`.
  std::uint64_t draws = 0;
  Rational p;

  // Hypergeometric: a roster of `population` shifts holding `successes`
  // incidents is shuffled and the suspect takes `draws` of them.
  std::uint64_t population = 0;
  std::uint64_t successes = 0;

  // Heterogeneous: nurse i works shifts[i] shifts at rate rates[i].
  std::vector<Rational> rates;
  std::vector<std::uint64_t> shifts;
  std::size_t suspect = 0;

  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
};

/// Throws ValidationError for a zero trial count, a rate outside [0,1],
/// a rate whose denominator exceeds 64 bits, or inconsistent sizes.
void validate(const SimulationSpec& spec);

struct SimulationResult {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double standard_error = 0.0;  // sqrt(estimate (1 - estimate) / trials)
  std::pair<double, double> interval;  // estimate -/+ 3 standard errors, clipped to [0,1]
};

/// Trials are split into fixed chunks of `kChunkTrials`; chunk c draws
/// from the seeded generator advanced by c jumps. Chunks are spread over
/// `workers` threads (0 = hardware concurrency) and their hit counts are
/// summed, so the result depends only on the spec and `k`.
inline constexpr std::uint64_t kChunkTrials = std::uint64_t{1} << 16;

/// Fraction of trials where the suspect's incident count is at least `k`.
/// For the heterogeneous model this is the suspect's tail.
SimulationResult simulate_tail(const SimulationSpec& spec, std::uint64_t k, unsigned workers = 0);

struct HeterogeneousResult {
  SimulationResult suspect;    // suspect's count >= k
  SimulationResult any_nurse;  // some nurse's count >= k
};

/// Each nurse draws each shift independently at their own rate, with at
/// most one incident per shift. Throws ValidationError when `rates` and
/// `shifts` differ in length or `suspect` is out of range.
HeterogeneousResult simulate_heterogeneous(std::span<const Rational> rates, std::span<const std::uint64_t> shifts,
                                           std::size_t suspect, std::uint64_t k, std::uint64_t trials,
                                           std::uint64_t seed, unsigned workers = 0);

/// True when `exact` lies within `sigmas` standard errors of the estimate,
/// using the standard error sqrt(exact (1 - exact) / trials) of the null.
bool agrees_with(const SimulationResult& result, double exact, double sigmas = 3.0);

nlohmann::json to_json(const SimulationSpec& spec);
/// Throws InputError naming the offending field.
SimulationSpec simulation_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SimulationResult& r);

/// `model,seed,trials,k,estimate,stderr`
std::string csv_log_header();
std::string csv_log_line(SimulationModel model, const SimulationResult& r, std::uint64_t k);
/// Appends one line, writing the header first when the file is new or empty.
void append_csv_log(const std::filesystem::path& path, SimulationModel model, const SimulationResult& r,
                    std::uint64_t k);

}  // namespace ctaudit
