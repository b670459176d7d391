#pragma once

#include "dysa/psychometrics.hpp"
#include "dysa/report.hpp"
#include "dysa/selection.hpp"
#include "dysa/session_store.hpp"
#include "dysa/synth.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dysa {

/// Writes run_manifest.json into out_dir.
void write_run_manifest(const std::filesystem::path& out_dir, const std::string& command,
                        const nlohmann::json& parameters, std::optional<std::uint64_t> seed,
                        const std::vector<std::filesystem::path>& inputs,
                        const std::vector<std::filesystem::path>& outputs,
                        const std::optional<std::filesystem::path>& config_file = std::nullopt);

struct IngestOptions {
    std::filesystem::path survey;
    std::optional<std::filesystem::path> catalog;
    double max_missing_rate = 0.5;
    bool strict = false;
    std::filesystem::path out;
    std::optional<std::filesystem::path> config_file;
};

/// Loads a survey file and writes dataset.json (the archive) plus
/// ingest_issues.json listing rejected rows and unknown columns.
LoadResult cmd_ingest(const IngestOptions& options);

struct SynthOptions {
    std::optional<std::filesystem::path> plan;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> students;
    std::optional<double> noise;
    std::filesystem::path out;
    std::optional<std::filesystem::path> config_file;
};

/// Writes survey.csv and manifest.json.
SynthManifest cmd_synth(const SynthOptions& options);

struct EvaluateOptions {
    std::filesystem::path dataset;  ///< dataset.json archive or a survey .csv
    std::optional<std::filesystem::path> grid;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::optional<int> threshold;           ///< restricts the grid
    std::optional<bool> inputs_binarized;   ///< restricts the grid
    ImputePolicy impute = ImputePolicy::DropRow;
    bool write_models = true;
    std::filesystem::path out;
    std::optional<std::filesystem::path> config_file;
};

/// Writes report.json, the tables, chart data, summary.txt and (unless
/// disabled) models.json, the registry used by cmd_predict.
EvaluationReport cmd_evaluate(const EvaluateOptions& options);

/// Re-renders tables, chart data and summary from a report file.
std::vector<std::filesystem::path> cmd_report(const std::filesystem::path& report, const std::filesystem::path& out,
                                              const std::optional<std::filesystem::path>& catalog = std::nullopt);

/// Loads serialized models only; never refits.
std::vector<std::pair<std::string, std::uint8_t>> cmd_predict(const std::filesystem::path& models,
                                                              std::span<const double> difficulties);

/// Answers file: ten agreement levels, one per line, or a JSON Rosenberg
/// session object.
SelfEsteemScore cmd_rosenberg_score(const std::filesystem::path& answers);

/// One parsed line of a session file ({"type": "user" | "silent_reading" |
/// "rosenberg", ...}) and its validation result.
struct SessionCheck {
    std::size_t line = 0;
    std::string type;
    ValidationResult result;
};

std::vector<SessionCheck> cmd_sessions_validate(const std::filesystem::path& file);
/// Returns the number of records imported. Stops at the first bad record.
std::size_t cmd_sessions_import(const std::filesystem::path& table_dir, const std::filesystem::path& file);
/// JSON lines of matching sessions; kind is "silent_reading", "rosenberg" or "all".
std::vector<std::string> cmd_sessions_list(const std::filesystem::path& table_dir, const SessionFilter& filter,
                                           const std::string& kind = "all");

}  // namespace dysa
