#include "dysa/forest.hpp"

#include "dysa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dysa {

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child Gini, lower is better
};

double gini(double pos, double n) {
    if (n <= 0.0) return 0.0;
    double p = pos / n;
    return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& X, const Labels& y, const ForestOptions& options, Rng& rng)
        : X_(X), y_(y), options_(options), rng_(rng) {
        d_ = static_cast<int>(X.cols());
        mtry_ = options.features_per_split > 0
                    ? std::min(options.features_per_split, d_)
                    : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d_))));
    }

    DecisionTree build(std::vector<std::size_t> rows) {
        nodes_.clear();
        grow(rows, 0);
        return DecisionTree(std::move(nodes_));
    }

private:
    int grow(std::vector<std::size_t>& rows, int depth) {
        std::size_t pos = 0;
        for (auto r : rows) pos += y_[r];
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        nodes_[id].label = 2 * pos > rows.size() ? 1 : 0;

        bool pure = pos == 0 || pos == rows.size();
        bool depth_capped = options_.max_depth && depth >= *options_.max_depth;
        if (pure || depth_capped || rows.size() < 2) return id;

        Split split = best_split(rows, pos);
        if (split.feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows)
            (X_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        int l = grow(left, depth + 1);
        int r = grow(right, depth + 1);
        nodes_[id].feature = split.feature;
        nodes_[id].threshold = split.threshold;
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    // Examines mtry randomly chosen features; keeps drawing features when
    // none of those admits a split (all values equal).
    Split best_split(const std::vector<std::size_t>& rows, std::size_t pos_total) {
        std::vector<int> features(static_cast<std::size_t>(d_));
        std::iota(features.begin(), features.end(), 0);
        rng_.shuffle(features);

        Split best;
        const double n = static_cast<double>(rows.size());
        std::vector<std::pair<double, std::uint8_t>> col(rows.size());
        int examined = 0;
        for (int f : features) {
            if (examined >= mtry_ && best.feature >= 0) break;
            ++examined;
            for (std::size_t i = 0; i < rows.size(); ++i)
                col[i] = {X_(static_cast<Eigen::Index>(rows[i]), f), y_[rows[i]]};
            std::sort(col.begin(), col.end());
            double left_pos = 0.0;
            for (std::size_t i = 0; i + 1 < col.size(); ++i) {
                left_pos += col[i].second;
                if (col[i].first == col[i + 1].first) continue;
                double nl = static_cast<double>(i + 1);
                double nr = n - nl;
                double imp = (nl * gini(left_pos, nl) + nr * gini(static_cast<double>(pos_total) - left_pos, nr)) / n;
                if (best.feature < 0 || imp < best.impurity) {
                    best = {f, 0.5 * (col[i].first + col[i + 1].first), imp};
                }
            }
        }
        return best;
    }

    const FeatureMatrix& X_;
    const Labels& y_;
    const ForestOptions& options_;
    Rng& rng_;
    int d_ = 0;
    int mtry_ = 1;
    std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

std::uint8_t DecisionTree::predict(std::span<const double> x) const {
    int i = 0;
    while (nodes_[i].feature >= 0)
        i = x[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    return nodes_[i].label;
}

std::size_t DecisionTree::depth() const {
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    std::size_t deepest = 0;
    while (!stack.empty()) {
        auto [i, dep] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, dep);
        if (nodes_[i].feature >= 0) {
            stack.emplace_back(nodes_[i].left, dep + 1);
            stack.emplace_back(nodes_[i].right, dep + 1);
        }
    }
    return deepest;
}

nlohmann::json DecisionTree::to_json() const {
    // Columnar layout keeps serialized forests compact.
    std::vector<int> feature, left, right, label;
    std::vector<double> threshold;
    for (const auto& n : nodes_) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        label.push_back(n.label);
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"label", label}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
    auto feature = j.at("feature").get<std::vector<int>>();
    auto threshold = j.at("threshold").get<std::vector<double>>();
    auto left = j.at("left").get<std::vector<int>>();
    auto right = j.at("right").get<std::vector<int>>();
    auto label = j.at("label").get<std::vector<int>>();
    std::vector<Node> nodes(feature.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        nodes[i] = {feature[i], threshold[i], left[i], right[i], static_cast<std::uint8_t>(label[i])};
    return DecisionTree(std::move(nodes));
}

RandomForest RandomForest::fit(const FeatureMatrix& X, const Labels& y, const ForestOptions& options,
                               std::uint64_t seed) {
    Rng rng(seed);
    TreeBuilder builder(X, y, options, rng);
    const auto n = static_cast<std::size_t>(X.rows());
    std::vector<DecisionTree> trees;
    trees.reserve(static_cast<std::size_t>(options.n_estimators));
    for (int t = 0; t < options.n_estimators; ++t) {
        std::vector<std::size_t> rows(n);
        if (options.bootstrap) {
            for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        trees.push_back(builder.build(std::move(rows)));
    }
    return RandomForest(std::move(trees));
}

double RandomForest::vote_fraction(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& t : trees_) votes += t.predict(x);
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

nlohmann::json RandomForest::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& t : trees_) arr.push_back(t.to_json());
    return {{"trees", arr}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
    std::vector<DecisionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(DecisionTree::from_json(t));
    return RandomForest(std::move(trees));
}

}  // namespace dysa
