#include "dysa/logistic.hpp"

#include "dysa/error.hpp"

#include <cmath>

namespace dysa {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Vector margins(const FeatureMatrix& X, const Vector& params) {
    const auto d = X.cols();
    return (X * params.head(d)).array() + params(d);
}

}  // namespace

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double logistic_loss(const FeatureMatrix& X, const Labels& y, const Vector& params, double l2) {
    const auto d = X.cols();
    Vector z = margins(X, params);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - y[static_cast<std::size_t>(i)] * z(i);
    return loss + 0.5 * l2 * params.head(d).squaredNorm();
}

Vector logistic_gradient(const FeatureMatrix& X, const Labels& y, const Vector& params, double l2) {
    const auto d = X.cols();
    Vector z = margins(X, params);
    Vector r(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) r(i) = sigmoid(z(i)) - y[static_cast<std::size_t>(i)];
    Vector g(d + 1);
    g.head(d) = X.transpose() * r + l2 * params.head(d);
    g(d) = r.sum();
    return g;
}

LogisticRegression LogisticRegression::fit(const FeatureMatrix& X, const Labels& y, const LogisticOptions& options,
                                           LogisticTrace* trace) {
    if (options.l2_strength < 0.0) throw ConfigError("logistic: l2_strength must be non-negative");
    if (options.max_iterations < 1) throw ConfigError("logistic: max_iterations must be positive");
    const auto d = X.cols();
    const double l2 = options.l2_strength;

    Vector params = Vector::Zero(d + 1);
    double loss = logistic_loss(X, y, params, l2);
    LogisticTrace local;
    LogisticTrace& tr = trace ? *trace : local;
    tr = {};
    tr.loss.push_back(loss);

    for (tr.iterations = 0; tr.iterations < options.max_iterations; ++tr.iterations) {
        Vector g = logistic_gradient(X, y, params, l2);
        tr.gradient_norm = g.norm();
        if (tr.gradient_norm < options.tolerance) {
            tr.converged = true;
            break;
        }
        // Hessian of the objective over (w, b).
        Vector z = margins(X, params);
        Vector wts(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            double p = sigmoid(z(i));
            wts(i) = p * (1.0 - p);
        }
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d + 1, d + 1);
        H.topLeftCorner(d, d) = X.transpose() * wts.asDiagonal() * X;
        Vector xw = X.transpose() * wts;
        H.block(0, d, d, 1) = xw;
        H.block(d, 0, 1, d) = xw.transpose();
        H(d, d) = wts.sum();
        H.topLeftCorner(d, d).diagonal().array() += l2;
        H.diagonal().array() += 1e-10;
        Vector step = H.ldlt().solve(g);
        if (!step.allFinite()) step = g;

        // Backtracking until the loss does not increase.
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            Vector candidate = params - t * step;
            double cand_loss = logistic_loss(X, y, candidate, l2);
            if (cand_loss <= loss - 1e-4 * t * g.dot(step) || (k == 59 && cand_loss <= loss)) {
                params = std::move(candidate);
                loss = cand_loss;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        tr.loss.push_back(loss);
    }
    if (!tr.converged) tr.gradient_norm = logistic_gradient(X, y, params, l2).norm();
    return LogisticRegression(params.head(d), params(d));
}

double LogisticRegression::probability(std::span<const double> x) const {
    Eigen::Map<const Vector> q(x.data(), static_cast<Eigen::Index>(x.size()));
    return sigmoid(weights_.dot(q) + intercept_);
}

nlohmann::json LogisticRegression::to_json() const {
    return {{"weights", std::vector<double>(weights_.begin(), weights_.end())}, {"intercept", intercept_}};
}

LogisticRegression LogisticRegression::from_json(const nlohmann::json& j) {
    auto w = j.at("weights").get<std::vector<double>>();
    return LogisticRegression(Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size())),
                              j.at("intercept").get<double>());
}

}  // namespace dysa
