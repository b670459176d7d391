#pragma once

#include "dysa/catalog.hpp"
#include "dysa/selection.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dysa {

nlohmann::json result_to_json(const TargetResult& r);
TargetResult result_from_json(const nlohmann::json& j);

/// "ID | Best Model | Thr | Input | Cons | Score" table for one target kind,
/// one row per evaluated target in catalog order, scores to 4 decimals.
/// Empty string when the report has no target of that kind.
std::string render_table(const EvaluationReport& report, const FeatureCatalog& catalog, FeatureKind kind);

/// "target,ccr" rows in catalog order, formatted exactly like the table.
std::string render_chart(const EvaluationReport& report, const FeatureCatalog& catalog, FeatureKind kind);

/// Two-line summary: per-kind mean CCR and the count of targets above 90%.
std::string render_summary(const EvaluationReport& report);

/// Writes tools_table.txt and strategies_table.txt into dir; a kind with no
/// results gets no file. Returns the files written.
std::vector<std::filesystem::path> render_tables(const EvaluationReport& report, const FeatureCatalog& catalog,
                                                 const std::filesystem::path& dir);

/// Writes tools_ccr.csv and strategies_ccr.csv (bar-chart data).
std::vector<std::filesystem::path> render_chart_data(const EvaluationReport& report, const FeatureCatalog& catalog,
                                                     const std::filesystem::path& dir);

void write_report(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport read_report(const std::filesystem::path& path);

}  // namespace dysa
