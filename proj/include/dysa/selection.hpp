#pragma once

#include "dysa/binarize.hpp"
#include "dysa/learners.hpp"
#include "dysa/survey.hpp"

#include <json.hpp>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dysa {

/// One row configuration of the result tables: threshold, input encoding,
/// learner and whether the consensus vote produced the label.
struct PipelineConfig {
    int threshold = 1;
    bool inputs_binarized = false;
    LearnerSpec learner;
    bool use_consensus = false;
    /// Consensus only: the voters. `learner` then names the voter with the
    /// highest individual score.
    std::vector<LearnerSpec> members;

    bool operator==(const PipelineConfig&) const = default;
};

std::string input_name(bool inputs_binarized);  // "Numeric" / "Binary"
std::string config_label(const PipelineConfig& c);
/// Seeds every fold model of this configuration (members excluded).
std::string config_key(const PipelineConfig& c);

nlohmann::json config_to_json(const PipelineConfig& c);
PipelineConfig config_from_json(const nlohmann::json& j);

/// Tie-break order: family, hyperparameters, threshold, numeric before
/// binary inputs, plain before consensus.
bool config_less(const PipelineConfig& a, const PipelineConfig& b);

/// Grid of configurations. Expanding yields thresholds x encodings x
/// learners, plus one consensus entry per (threshold, encoding) when
/// consensus is enabled.
struct Grid {
    std::vector<int> thresholds{1, 4};
    std::vector<bool> encodings{false, true};
    std::vector<LearnerSpec> learners;
    bool consensus = true;

    /// Thresholds {1,4}, both encodings, RF 50 trees, KNN k in {5,7,9,11},
    /// SVM linear, SVM RBF, LR, consensus on and off.
    static Grid standard();
    std::vector<PipelineConfig> expand() const;

    nlohmann::json to_json() const;
    static Grid from_json(const nlohmann::json& j);
};

/// Correct classification rate: agreements / n.
double ccr(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted);

struct FoldPlan {
    std::size_t n = 0;
    std::size_t k = 10;
    std::uint64_t seed = 0;
    std::vector<std::size_t> assignment;  ///< fold of each record

    std::vector<std::size_t> test_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Seeded uniform permutation cut into k contiguous blocks; the first n % k
/// blocks get one extra record.
FoldPlan make_folds(std::size_t n, std::size_t k = 10, std::uint64_t seed = 0);

/// Out-of-fold evaluation of one configuration on one target.
struct CvOutcome {
    std::vector<std::size_t> rows;           ///< view rows used (target answered)
    std::vector<std::uint8_t> truth;         ///< label of each used row
    std::vector<std::uint8_t> predictions;   ///< out-of-fold prediction of each used row
    std::vector<double> fold_ccr;
    std::vector<double> fold_positive_rate;  ///< test-fold positive rates
    double mean_ccr = 0.0;
    double pooled_ccr = 0.0;
    double positive_rate = 0.0;
    std::size_t degenerate_folds = 0;        ///< folds whose training labels had one class
    std::vector<std::uint64_t> fold_fingerprints;  ///< filled when requested
};

struct CvOptions {
    bool record_fingerprints = false;
};

/// For every fold: fit on the other folds' rows, predict the fold, score
/// CCR. Scaling and every other statistic come from training rows only.
/// `plan` indexes the answered rows of the target; `target_seed` seeds the
/// fold models through config_key.
CvOutcome cross_validate(const PipelineConfig& config, const BinaryView& view, const std::string& target,
                         const FoldPlan& plan, std::uint64_t target_seed, const CvOptions& options = {});

/// Same, with the fold plan derived from target_seed.
CvOutcome cross_validate(const PipelineConfig& config, const BinaryView& view, const std::string& target,
                         std::uint64_t target_seed);

/// Fold plan shared by every configuration of a target.
FoldPlan target_folds(std::size_t n_answered, std::uint64_t target_seed, std::size_t k = 10);

/// Majority of votes; a tie goes to the vote of the member with the
/// highest score, and to 0 if those top members disagree.
std::uint8_t consensus_vote(std::span<const std::uint8_t> votes, std::span<const double> member_scores);

struct ConsensusMember {
    TrainedModel model;
    double cv_ccr = 0.0;
};

std::uint8_t consensus_predict(std::span<const ConsensusMember> members, std::span<const double> x);

/// Consensus of member configurations evaluated on the same folds. Members
/// must share threshold and input encoding.
CvOutcome consensus_cv(const std::vector<PipelineConfig>& members, const BinaryView& view, const std::string& target,
                       const FoldPlan& plan, std::uint64_t target_seed);

struct EvaluatedConfig {
    PipelineConfig config;
    double mean_ccr = 0.0;
};

struct TargetResult {
    std::string target;
    PipelineConfig best_config;
    double mean_ccr = 0.0;
    std::vector<double> per_fold_ccr;
    double pooled_ccr = 0.0;
    double positive_rate = 0.0;
    double baseline_ccr = 0.0;  ///< majority-class predictor on the same labels
    std::vector<double> fold_positive_rate;
    std::size_t degenerate_folds = 0;
    std::size_t n_rows = 0;
    std::vector<EvaluatedConfig> evaluated;
    std::optional<std::string> error;  ///< set when the target could not be evaluated
};

/// Evaluates every configuration with 10-fold CV and returns the best one.
TargetResult grid_search(const Dataset& dataset, const std::string& target, const std::vector<PipelineConfig>& grid,
                         std::uint64_t seed, ImputePolicy impute = ImputePolicy::DropRow);

/// Per-target seed: derive_seed(seed, target).
std::uint64_t target_seed(std::uint64_t seed, const std::string& target);

struct EvaluationReport {
    std::vector<TargetResult> results;  ///< catalog order
    double tools_mean_ccr = 0.0;
    double strategies_mean_ccr = 0.0;
    std::size_t tools_count = 0;
    std::size_t strategies_count = 0;
    std::size_t tools_above_90 = 0;
    std::size_t strategies_above_90 = 0;
    nlohmann::json metadata;

    /// Mean over every evaluated target.
    double overall_mean_ccr() const;

    nlohmann::json to_json() const;
    static EvaluationReport from_json(const nlohmann::json& j);
};

/// Recomputes the tool/strategy means and counts from results.
void summarize(EvaluationReport& report, const FeatureCatalog& catalog);

struct RunOptions {
    std::size_t jobs = 1;
    ImputePolicy impute = ImputePolicy::DropRow;
};

/// grid_search over every active target. A failing target is recorded in
/// its TargetResult.error and excluded from the summary means.
EvaluationReport run_all_targets(const Dataset& dataset, const Grid& grid, std::uint64_t seed,
                                 const RunOptions& options = {});

/// Hash of the dataset's records and dropped targets.
std::uint64_t dataset_fingerprint(const Dataset& dataset);

}  // namespace dysa
