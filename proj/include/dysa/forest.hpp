#pragma once

#include "dysa/types.hpp"

#include <json.hpp>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dysa {

/// CART classification tree grown on Gini impurity.
class DecisionTree {
public:
    struct Node {
        int feature = -1;  ///< -1 marks a leaf
        double threshold = 0.0;  ///< go left when x[feature] <= threshold
        int left = -1;
        int right = -1;
        std::uint8_t label = 0;  ///< leaf majority (ties -> 0)
    };

    DecisionTree() = default;
    explicit DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    std::uint8_t predict(std::span<const double> x) const;
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t depth() const;

    nlohmann::json to_json() const;
    static DecisionTree from_json(const nlohmann::json& j);

private:
    std::vector<Node> nodes_;
};

struct ForestOptions {
    int n_estimators = 50;
    std::optional<int> max_depth;  ///< unlimited when empty
    bool bootstrap = true;
    int features_per_split = 0;  ///< 0 -> ceil(sqrt(d))
};

/// Bagged ensemble of randomised trees; predicts by majority vote.
class RandomForest {
public:
    RandomForest() = default;
    explicit RandomForest(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {}

    static RandomForest fit(const FeatureMatrix& X, const Labels& y, const ForestOptions& options,
                            std::uint64_t seed);

    /// Fraction of trees voting 1.
    double vote_fraction(std::span<const double> x) const;
    const std::vector<DecisionTree>& trees() const { return trees_; }

    nlohmann::json to_json() const;
    static RandomForest from_json(const nlohmann::json& j);

private:
    std::vector<DecisionTree> trees_;
};

}  // namespace dysa
