#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctaudit/table.hpp"

namespace ctaudit {

/// Per-dataset analysis settings that travel with a dataset.
struct DatasetConfig {
  /// Post-hoc correction factor (nurses on the roster).
  std::optional<std::uint64_t> n_nurses;
  /// Thresholds of the binomial tail table, inclusive.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> tail_range;
  /// Published multiway association value. Kept as metadata; nothing in
  /// this library computes it.
  std::optional<double> multiway_reference;
};

struct Dataset {
  StratifiedTable table;
  DatasetConfig config;
};

// Canonical JSON:
//   {"name": str, "row_labels": [str,str], "col_labels": [str,str],
//    "strata": [{"label": str, "counts": [[int,int],[int,int]]}]}
// Counts may also be bordered 3x3 (with sums) or decimal strings for
// values beyond 64 bits. `source` prefixes error messages.
StratifiedTable parse_json_dataset(std::string_view text, const std::string& source);
nlohmann::json to_json(const StratifiedTable& s);

// CSV: one row per stratum, `stratum,a,b,c,d`, optional header row, '#'
// comments. Default row/column labels are used.
StratifiedTable parse_csv_dataset(std::string_view text, const std::string& name, const std::string& source);
std::string to_csv(const StratifiedTable& s);

/// Dispatches on extension (.json / .csv), sniffing the first character
/// otherwise. Throws InputError when the file cannot be read or parsed.
StratifiedTable load_dataset(const std::filesystem::path& path);

/// Names of the datasets compiled into the library, in report order.
const std::vector<std::string>& embedded_names();
/// Throws InputError for an unknown name.
const Dataset& embedded_dataset(std::string_view name);

}  // namespace ctaudit
