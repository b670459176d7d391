#pragma once

#include "dysa/forest.hpp"
#include "dysa/knn.hpp"
#include "dysa/logistic.hpp"
#include "dysa/scaling.hpp"
#include "dysa/svm.hpp"
#include "dysa/types.hpp"

#include <json.hpp>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace dysa {

/// Ordered by the tie-break preference used in model selection.
enum class Family { RF = 0, KNN = 1, SVM = 2, LR = 3 };

struct ForestSpec {
    int n_estimators = 50;
    std::optional<int> max_depth;
    std::optional<std::uint64_t> seed;  ///< overrides the fit seed when set
    bool operator==(const ForestSpec&) const = default;
};

struct KnnSpec {
    int k = 5;
    bool operator==(const KnnSpec&) const = default;
};

struct SvmSpec {
    KernelType kernel = KernelType::Linear;
    double cost = 1.0;
    std::optional<double> gamma;  ///< empty -> "scale": 1 / (d * variance of the scaled inputs)
    double tolerance = 1e-3;
    bool operator==(const SvmSpec&) const = default;
};

struct LogisticSpec {
    double l2_strength = 1.0;
    int max_iterations = 1000;
    double tolerance = 1e-6;
    bool operator==(const LogisticSpec&) const = default;
};

using LearnerSpec = std::variant<ForestSpec, KnnSpec, SvmSpec, LogisticSpec>;

Family family_of(const LearnerSpec& spec);
std::string family_name(Family f);

/// Name in the result tables: "RF, 50 estimators", "KNN K=7", "SVM Linear", "SVM RBF", "LR".
std::string display_name(const LearnerSpec& spec);

/// Canonical text key, stable across runs; used for seeding and caching.
std::string spec_key(const LearnerSpec& spec);

/// Throws ConfigError when a hyperparameter is out of range.
void validate(const LearnerSpec& spec);

/// Strict ordering used to break score ties: family, then hyperparameters.
bool simpler_than(const LearnerSpec& a, const LearnerSpec& b);

nlohmann::json spec_to_json(const LearnerSpec& spec);
/// Accepts exactly the keys of the family; missing keys take defaults.
LearnerSpec spec_from_json(const nlohmann::json& j);

/// A fitted classifier. Immutable; predict and decision_value are pure.
class TrainedModel {
public:
    static constexpr int kFormatVersion = 1;

    using State = std::variant<std::monostate, RandomForest, NearestNeighbors, SupportVectorMachine, LogisticRegression>;

    TrainedModel(LearnerSpec spec, std::size_t dimension, Scaling scaling, State state);
    static TrainedModel constant(LearnerSpec spec, std::size_t dimension, std::uint8_t label);

    const LearnerSpec& spec() const { return spec_; }
    std::size_t dimension() const { return dimension_; }
    const Scaling& scaling() const { return scaling_; }
    const State& state() const { return state_; }

    /// True for a model fitted on single-class labels.
    bool degenerate() const { return constant_.has_value(); }

    std::uint8_t predict(std::span<const double> x) const;

    /// SVM margin, LR probability, or RF/KNN vote fraction. label = 1 iff the
    /// value exceeds decision_threshold().
    double decision_value(std::span<const double> x) const;
    double decision_threshold() const;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);

    /// FNV-1a hash of the serialized form.
    std::uint64_t fingerprint() const;

private:
    void check_dimension(std::span<const double> x) const;

    LearnerSpec spec_;
    std::size_t dimension_ = 0;
    Scaling scaling_;
    State state_;
    std::optional<std::uint8_t> constant_;
};

/// Fits a model. Deterministic in (spec, X, y, seed). RF sees raw inputs;
/// KNN, SVM and LR see inputs scaled per feature on these rows.
/// Single-class y yields a degenerate constant model without running a solver.
TrainedModel fit(const LearnerSpec& spec, const FeatureMatrix& X, const Labels& y, std::uint64_t seed);

inline std::span<const double> row_span(const FeatureMatrix& X, Eigen::Index i) {
    return {X.data() + i * X.cols(), static_cast<std::size_t>(X.cols())};
}

}  // namespace dysa
