#pragma once

#include "dysa/types.hpp"

#include <json.hpp>
#include <span>
#include <vector>

namespace dysa {

/// Parameters of a logistic model: weights followed by the intercept.
/// The objective is
///   L(w, b) = sum_i [log(1 + exp(z_i)) - y_i z_i] + l2/2 |w|^2,  z_i = w.x_i + b
/// (the intercept is not penalised).
double logistic_loss(const FeatureMatrix& X, const Labels& y, const Vector& params, double l2);
Vector logistic_gradient(const FeatureMatrix& X, const Labels& y, const Vector& params, double l2);

double sigmoid(double z);

struct LogisticOptions {
    double l2_strength = 1.0;
    int max_iterations = 1000;
    double tolerance = 1e-6;  ///< on the gradient norm
};

struct LogisticTrace {
    std::vector<double> loss;  ///< objective after each accepted iteration (index 0: start)
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Binary logistic regression fitted by damped Newton steps with a
/// backtracking line search, so accepted iterations never raise the loss.
class LogisticRegression {
public:
    LogisticRegression() = default;
    LogisticRegression(Vector weights, double intercept) : weights_(std::move(weights)), intercept_(intercept) {}

    static LogisticRegression fit(const FeatureMatrix& X, const Labels& y, const LogisticOptions& options,
                                  LogisticTrace* trace = nullptr);

    double probability(std::span<const double> x) const;

    const Vector& weights() const { return weights_; }
    double intercept() const { return intercept_; }

    nlohmann::json to_json() const;
    static LogisticRegression from_json(const nlohmann::json& j);

private:
    Vector weights_;
    double intercept_ = 0.0;
};

}  // namespace dysa
