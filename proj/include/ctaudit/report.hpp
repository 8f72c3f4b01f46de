#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ctaudit/pipeline.hpp"

namespace ctaudit {

/// {"value": double, "display": 6 significant figures, "decimal": 20
/// significant digits, "exact": "p/q" when short}.
nlohmann::json probability_json(const Rational& q);

nlohmann::json to_json(const NominalCorrelationResult& r);
nlohmann::json to_json(const OddsRatio& r);
nlohmann::json to_json(const CollapseComparison& c);
nlohmann::json to_json(const SimpsonVerdict& v);
nlohmann::json to_json(const RateTable& t);
nlohmann::json to_json(const FisherPipelineResult& r);
nlohmann::json to_json(const TailTable& t);
nlohmann::json to_json(const BinomialAnalysisResult& r);
nlohmann::json to_json(const DatasetDiff& d);
nlohmann::json to_json(const FigureModel& f);
nlohmann::json to_json(const AnalysisReport& report);

/// Left-aligned columns separated by two spaces, each line indented.
std::string align_columns(const std::vector<std::vector<std::string>>& rows, const std::string& indent = "  ");

std::string render_text(const AnalysisReport& report);

}  // namespace ctaudit
