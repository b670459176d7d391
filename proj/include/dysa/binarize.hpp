#pragma once

#include "dysa/survey.hpp"
#include "dysa/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace dysa {

enum class ImputePolicy {
    DropRow,  ///< rows with any missing difficulty are left out
    Median,   ///< missing difficulties take the column median
};

/// A target label: 0, 1, or kMissingLabel where the student did not answer.
inline constexpr std::int8_t kMissingLabel = -1;

/// label = 1 exactly when value > threshold.
constexpr bool above_threshold(int value, int threshold) { return value > threshold; }

/// Thresholded projection of a dataset: inputs X (raw 0-5, or 0/1 when
/// inputs_binarized) and one label vector per active target.
struct BinaryView {
    int threshold = 1;
    bool inputs_binarized = false;
    std::vector<std::size_t> source_rows;  ///< dataset row of each view row
    FeatureMatrix X;
    std::vector<std::string> targets;
    std::map<std::string, std::vector<std::int8_t>> y;

    std::size_t size() const { return source_rows.size(); }

    /// Labels for a target, throwing if the target is not active.
    const std::vector<std::int8_t>& labels(const std::string& target) const;

    /// View rows where the target was answered.
    std::vector<std::size_t> observed_rows(const std::string& target) const;
};

BinaryView binarize(const Dataset& dataset, int threshold, bool inputs_binarized,
                    ImputePolicy impute = ImputePolicy::DropRow);

/// Fraction of positive labels among the answered rows of a target.
double class_balance(const BinaryView& view, const std::string& target);

}  // namespace dysa
