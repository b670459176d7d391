#pragma once

#include "dysa/catalog.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dysa {

/// A Likert answer in [0, 5]; std::nullopt marks a missing cell.
using Likert = std::optional<std::uint8_t>;

inline constexpr int kLikertMin = 0;
inline constexpr int kLikertMax = 5;

/// One student's answers, indexed by the dataset's column order
/// (difficulties, then tools, then strategies, as in the catalog).
struct SurveyRecord {
    std::string student_id;
    std::vector<Likert> answers;

    bool operator==(const SurveyRecord&) const = default;
};

/// An immutable table of survey records.
class Dataset {
public:
    /// Validates that every record has one answer per catalog column and
    /// that every present answer is in range; computes per-column missing
    /// rates. Nothing is dropped here.
    Dataset(FeatureCatalog catalog, std::vector<SurveyRecord> records,
            std::map<std::string, double> dropped_targets = {});

    const FeatureCatalog& catalog() const { return catalog_; }
    const std::vector<SurveyRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    /// All catalog identifiers in column order.
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t column_index(std::string_view id) const;

    Likert value(std::size_t row, std::string_view id) const {
        return records_[row].answers[column_index(id)];
    }

    double missing_rate(std::string_view id) const { return missing_rates_[column_index(id)]; }

    /// Dropped target id -> its missing rate at the time it was dropped.
    const std::map<std::string, double>& dropped_targets() const { return dropped_; }

    /// Catalog targets (tools then strategies) that were not dropped.
    std::vector<std::string> active_targets() const;
    bool is_active_target(std::string_view id) const;

    bool operator==(const Dataset& other) const {
        return catalog_ == other.catalog_ && records_ == other.records_ && dropped_ == other.dropped_;
    }

private:
    FeatureCatalog catalog_;
    std::vector<SurveyRecord> records_;
    std::vector<std::string> columns_;
    std::vector<double> missing_rates_;
    std::map<std::string, double> dropped_;
};

enum class RowPolicy {
    Skip,  ///< malformed rows are rejected and listed, loading continues
    Fail,  ///< any malformed row raises DataError
};

struct LoadOptions {
    const FeatureCatalog* catalog = &FeatureCatalog::standard();
    char delimiter = ',';
    double max_missing_rate = 0.5;
    RowPolicy row_policy = RowPolicy::Skip;
};

struct RowIssue {
    std::size_t row;  ///< 1-based data row (header excluded)
    std::string column;
    std::string message;
};

struct LoadResult {
    Dataset dataset;
    std::vector<RowIssue> rejected;
    std::vector<std::string> unknown_columns;
};

/// Reads a delimited survey file. The header names catalog identifiers and
/// optionally a "student_id" column; an empty cell is a missing answer.
/// Every difficulty column must be present in the header. Targets whose
/// missing rate exceeds options.max_missing_rate are dropped.
LoadResult load_survey(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes every column, including dropped targets, so that loading the
/// output reproduces the dataset.
void write_survey(const Dataset& dataset, const std::filesystem::path& path, char delimiter = ',');

/// Moves every target whose missing rate exceeds max_missing_rate into the
/// dropped set. Difficulty columns are never dropped. Row order is kept.
Dataset drop_sparse_targets(const Dataset& dataset, double max_missing_rate);

}  // namespace dysa

#include <json.hpp>

namespace dysa {

/// Dataset archive: catalog, records (null for missing) and dropped targets.
nlohmann::json dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const nlohmann::json& j);

}  // namespace dysa
