#include "ctaudit/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ctaudit/error.hpp"

namespace ctaudit {

using nlohmann::json;

namespace {

Count count_from_json(const json& value, const std::string& where) {
  if (value.is_number_unsigned()) return Count(value.get<std::uint64_t>());
  if (value.is_number_integer()) return Count(value.get<std::int64_t>());
  if (value.is_string()) {
    try {
      return parse_integer(value.get<std::string>());
    } catch (const InputError&) {
      throw InputError(where + ": not an integer: \"" + value.get<std::string>() + "\"");
    }
  }
  throw InputError(where + ": expected an integer count, got " + value.dump());
}

json count_to_json(const Count& value) {
  if (value >= std::numeric_limits<std::int64_t>::min() && value <= std::numeric_limits<std::int64_t>::max()) {
    return value.convert_to<std::int64_t>();
  }
  return value.str();
}

LabelPair labels_from_json(const json& root, const char* key, const LabelPair& fallback, const std::string& source) {
  if (!root.contains(key)) return fallback;
  const json& value = root.at(key);
  if (!value.is_array() || value.size() != 2 || !value[0].is_string() || !value[1].is_string()) {
    throw InputError(source + ": \"" + key + "\" must be an array of two strings");
  }
  return {value[0].get<std::string>(), value[1].get<std::string>()};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Counts as printed in the published tables (inner cells only).
constexpr std::string_view kOriginalJson = R"({
  "name": "original",
  "row_labels": ["V", "Other"],
  "col_labels": ["Incident", "No incident"],
  "strata": [
    {"label": "JKZ",  "counts": [[8, 134], [0, 887]]},
    {"label": "RKZ1", "counts": [[1, 0], [4, 361]]},
    {"label": "RKZ2", "counts": [[5, 53], [9, 272]]}
  ]
})";

constexpr std::string_view kDerksenJson = R"({
  "name": "derksen",
  "row_labels": ["V", "Other"],
  "col_labels": ["Incident", "No incident"],
  "strata": [
    {"label": "JKZ",  "counts": [[4, 138], [1, 886]]},
    {"label": "RKZ1", "counts": [[1, 2], [4, 359]]},
    {"label": "RKZ2", "counts": [[1, 57], [9, 272]]}
  ]
})";

constexpr std::string_view kShopsJson = R"({
  "name": "shops",
  "row_labels": ["Green", "Blue"],
  "col_labels": ["Fit", "No fit"],
  "strata": [
    {"label": "Shop1", "counts": [[5, 1], [8, 2]]},
    {"label": "Shop2", "counts": [[2, 8], [1, 5]]}
  ]
})";

std::map<std::string, Dataset, std::less<>> build_registry() {
  std::map<std::string, Dataset, std::less<>> out;
  out.emplace("original", Dataset{parse_json_dataset(kOriginalJson, "<embedded:original>"),
                                  DatasetConfig{27, std::pair<std::uint64_t, std::uint64_t>{3, 15}, 0.337002}});
  out.emplace("derksen", Dataset{parse_json_dataset(kDerksenJson, "<embedded:derksen>"),
                                 DatasetConfig{27, std::pair<std::uint64_t, std::uint64_t>{3, 9}, 0.246024}});
  out.emplace("shops", Dataset{parse_json_dataset(kShopsJson, "<embedded:shops>"),
                               DatasetConfig{std::nullopt, std::nullopt, 0.665851}});
  return out;
}

}  // namespace

StratifiedTable parse_json_dataset(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  if (!root.is_object()) throw InputError(source + ": top-level value must be an object");

  const std::string name = root.contains("name") && root["name"].is_string() ? root["name"].get<std::string>()
                                                                              : std::string("dataset");
  const LabelPair rows = labels_from_json(root, "row_labels", kDefaultRowLabels, source);
  const LabelPair cols = labels_from_json(root, "col_labels", kDefaultColLabels, source);

  if (!root.contains("strata") || !root["strata"].is_array()) {
    throw InputError(source + ": missing \"strata\" array");
  }
  const json& strata = root["strata"];
  if (strata.empty()) throw InputError(source + ": \"strata\" is empty");

  std::vector<Stratum> out;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string where = source + ": strata[" + std::to_string(i) + "]";
    const json& entry = strata[i];
    if (!entry.is_object() || !entry.contains("counts") || !entry["counts"].is_array()) {
      throw InputError(where + ": expected an object with a \"counts\" matrix");
    }
    const std::string label = entry.contains("label") && entry["label"].is_string()
                                  ? entry["label"].get<std::string>()
                                  : "stratum" + std::to_string(i + 1);
    CountMatrix raw;
    for (std::size_t r = 0; r < entry["counts"].size(); ++r) {
      const json& row = entry["counts"][r];
      if (!row.is_array()) throw InputError(where + ".counts[" + std::to_string(r) + "]: expected an array");
      std::vector<Count> values;
      for (std::size_t c = 0; c < row.size(); ++c) {
        values.push_back(count_from_json(row[c], where + ".counts[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
      }
      raw.push_back(std::move(values));
    }
    try {
      out.push_back({label, validate(raw, std::nullopt, rows, cols)});
    } catch (const InputError& e) {
      throw InputError(where + " (" + label + "): " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + " (" + label + "): " + e.what());
    }
  }
  return StratifiedTable(name, std::move(out));
}

json to_json(const StratifiedTable& s) {
  json strata = json::array();
  for (const auto& stratum : s.strata()) {
    const Table2x2& t = stratum.table;
    strata.push_back({{"label", stratum.label},
                      {"counts", json::array({json::array({count_to_json(t.a()), count_to_json(t.b())}),
                                              json::array({count_to_json(t.c()), count_to_json(t.d())})})}});
  }
  return {{"name", s.name()},
          {"row_labels", {s.row_labels()[0], s.row_labels()[1]}},
          {"col_labels", {s.col_labels()[0], s.col_labels()[1]}},
          {"strata", strata}};
}

StratifiedTable parse_csv_dataset(std::string_view text, const std::string& name, const std::string& source) {
  std::vector<Stratum> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fields = split_csv_line(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() != 5) {
      throw InputError(where + ": expected 5 fields (stratum,a,b,c,d), got " + std::to_string(fields.size()));
    }
    if (!seen_row && fields[0] == "stratum") {
      seen_row = true;
      continue;  // header
    }
    seen_row = true;
    std::array<Count, 4> counts;
    for (std::size_t i = 0; i < 4; ++i) {
      try {
        counts[i] = parse_integer(fields[i + 1]);
      } catch (const InputError&) {
        throw InputError(where + ": field " + std::to_string(i + 2) + " is not an integer: \"" + fields[i + 1] + "\"");
      }
    }
    try {
      out.push_back({fields[0], Table2x2(counts[0], counts[1], counts[2], counts[3])});
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (out.empty()) throw InputError(source + ": no strata");
  return StratifiedTable(name, std::move(out));
}

std::string to_csv(const StratifiedTable& s) {
  std::ostringstream out;
  out << "stratum,a,b,c,d\n";
  for (const auto& stratum : s.strata()) {
    const Table2x2& t = stratum.table;
    out << stratum.label << ',' << t.a() << ',' << t.b() << ',' << t.c() << ',' << t.d() << '\n';
  }
  return out.str();
}

StratifiedTable load_dataset(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  bool is_json = ext == ".json";
  if (ext != ".json" && ext != ".csv") {
    const auto first = text.find_first_not_of(" \t\r\n");
    is_json = first != std::string::npos && text[first] == '{';
  }
  if (is_json) return parse_json_dataset(text, path.string());
  return parse_csv_dataset(text, path.stem().string(), path.string());
}

const std::vector<std::string>& embedded_names() {
  static const std::vector<std::string> names{"original", "derksen", "shops"};
  return names;
}

const Dataset& embedded_dataset(std::string_view name) {
  static const auto registry = build_registry();
  const auto it = registry.find(name);
  if (it == registry.end()) {
    std::string known;
    for (const auto& n : embedded_names()) known += (known.empty() ? "" : ", ") + n;
    throw InputError("unknown dataset '" + std::string(name) + "' (embedded: " + known + ")");
  }
  return it->second;
}

}  // namespace ctaudit
