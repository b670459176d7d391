#include "dysa/svm.hpp"

#include "dysa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dysa {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        d2 += t * t;
    }
    return std::exp(-gamma * d2);
}

double kernel_value(const KernelParams& k, std::span<const double> a, std::span<const double> b) {
    if (k.type == KernelType::Rbf) return rbf_kernel(a, b, k.gamma);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Eigen::MatrixXd gram_matrix(const FeatureMatrix& X, const KernelParams& k) {
    Eigen::MatrixXd G = X * X.transpose();
    if (k.type == KernelType::Rbf) {
        Vector sq = X.rowwise().squaredNorm();
        for (Eigen::Index i = 0; i < G.rows(); ++i) {
            G(i, i) = 1.0;
            for (Eigen::Index j = i + 1; j < G.cols(); ++j)
                G(j, i) = G(i, j) = std::exp(-k.gamma * std::max(0.0, sq(i) + sq(j) - 2.0 * G(i, j)));
        }
    } else {
        for (Eigen::Index i = 0; i < G.rows(); ++i)
            for (Eigen::Index j = i + 1; j < G.cols(); ++j) G(j, i) = G(i, j);
    }
    return G;
}

SvmDualSolution solve_svm_dual(const FeatureMatrix& X, const Labels& y, const KernelParams& kernel, double cost,
                               double tolerance) {
    constexpr double kTau = 1e-12;
    const auto n = static_cast<Eigen::Index>(X.rows());
    if (static_cast<std::size_t>(n) != y.size()) throw DataError("svm: X/y row mismatch");
    if (!(cost > 0.0)) throw ConfigError("svm: cost must be positive");

    const Eigen::MatrixXd K = gram_matrix(X, kernel);
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;

    Vector alpha = Vector::Zero(n);
    Vector grad = Vector::Constant(n, -1.0);  // Q alpha - e
    auto at_upper = [&](Eigen::Index t) { return alpha(t) >= cost; };
    auto at_lower = [&](Eigen::Index t) { return alpha(t) <= 0.0; };

    SvmDualSolution sol;
    const long max_iter = std::max<long>(10'000'000, 100L * n);
    for (sol.iterations = 0; sol.iterations < max_iter; ++sol.iterations) {
        // i: maximal violator in the "up" set.
        double gmax = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            bool up = s(t) > 0 ? !at_upper(t) : !at_lower(t);
            if (up && -s(t) * grad(t) >= gmax) {
                gmax = -s(t) * grad(t);
                i = t;
            }
        }
        // j: second-order choice in the "low" set.
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            bool low = s(t) > 0 ? !at_lower(t) : !at_upper(t);
            if (!low) continue;
            double sg = s(t) * grad(t);
            gmax2 = std::max(gmax2, sg);
            if (i < 0) continue;
            double diff = gmax + sg;
            if (diff > 0.0) {
                double quad = K(i, i) + K(t, t) - 2.0 * K(i, t);
                double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
                if (obj <= best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if (i < 0 || j < 0 || gmax + gmax2 < tolerance) {
            sol.converged = true;
            break;
        }

        const double ai_old = alpha(i), aj_old = alpha(j);
        const double qij = s(i) * s(j) * K(i, j);
        if (s(i) != s(j)) {
            double quad = K(i, i) + K(j, j) + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            double delta = (-grad(i) - grad(j)) / quad;
            double diff = alpha(i) - alpha(j);
            alpha(i) += delta;
            alpha(j) += delta;
            if (diff > 0.0) {
                if (alpha(j) < 0.0) {
                    alpha(j) = 0.0;
                    alpha(i) = diff;
                }
            } else if (alpha(i) < 0.0) {
                alpha(i) = 0.0;
                alpha(j) = -diff;
            }
            if (diff > 0.0) {
                if (alpha(i) > cost) {
                    alpha(i) = cost;
                    alpha(j) = cost - diff;
                }
            } else if (alpha(j) > cost) {
                alpha(j) = cost;
                alpha(i) = cost + diff;
            }
        } else {
            double quad = K(i, i) + K(j, j) - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            double delta = (grad(i) - grad(j)) / quad;
            double sum = alpha(i) + alpha(j);
            alpha(i) -= delta;
            alpha(j) += delta;
            if (sum > cost) {
                if (alpha(i) > cost) {
                    alpha(i) = cost;
                    alpha(j) = sum - cost;
                }
            } else if (alpha(j) < 0.0) {
                alpha(j) = 0.0;
                alpha(i) = sum;
            }
            if (sum > cost) {
                if (alpha(j) > cost) {
                    alpha(j) = cost;
                    alpha(i) = sum - cost;
                }
            } else if (alpha(i) < 0.0) {
                alpha(i) = 0.0;
                alpha(j) = sum;
            }
        }

        const double dai = alpha(i) - ai_old, daj = alpha(j) - aj_old;
        for (Eigen::Index t = 0; t < n; ++t)
            grad(t) += s(t) * (s(i) * K(t, i) * dai + s(j) * K(t, j) * daj);
    }

    // bias = -rho: mean of s_i G_i over free vectors, else the midpoint of
    // the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    long n_free = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        double sg = s(t) * grad(t);
        if (at_upper(t)) {
            if (s(t) < 0) ub = std::min(ub, sg);
            else lb = std::max(lb, sg);
        } else if (at_lower(t)) {
            if (s(t) > 0) ub = std::min(ub, sg);
            else lb = std::max(lb, sg);
        } else {
            ++n_free;
            sum_free += sg;
        }
    }
    double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    sol.alpha = std::move(alpha);
    sol.bias = -rho;
    return sol;
}

SupportVectorMachine SupportVectorMachine::from_solution(const FeatureMatrix& X, const Labels& y,
                                                         const KernelParams& kernel, const SvmDualSolution& sol) {
    SupportVectorMachine m;
    m.kernel_ = kernel;
    m.bias_ = sol.bias;
    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < sol.alpha.size(); ++i)
        if (sol.alpha(i) > 0.0) sv.push_back(i);
    m.coef_.resize(static_cast<Eigen::Index>(sv.size()));
    m.support_.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
    for (std::size_t r = 0; r < sv.size(); ++r) {
        auto i = sv[r];
        m.coef_(static_cast<Eigen::Index>(r)) = sol.alpha(i) * (y[static_cast<std::size_t>(i)] ? 1.0 : -1.0);
        m.support_.row(static_cast<Eigen::Index>(r)) = X.row(i);
    }
    if (kernel.type == KernelType::Linear) {
        m.weights_ = m.support_.transpose() * m.coef_;
        m.support_.resize(0, X.cols());
    }
    return m;
}

double SupportVectorMachine::decision(std::span<const double> x) const {
    Eigen::Map<const Vector> q(x.data(), static_cast<Eigen::Index>(x.size()));
    if (kernel_.type == KernelType::Linear) return weights_.dot(q) + bias_;
    double f = bias_;
    for (Eigen::Index r = 0; r < support_.rows(); ++r) {
        std::span<const double> row(support_.row(r).data(), static_cast<std::size_t>(support_.cols()));
        f += coef_(r) * rbf_kernel(row, x, kernel_.gamma);
    }
    return f;
}

nlohmann::json SupportVectorMachine::to_json() const {
    nlohmann::json j{{"kernel", kernel_.type == KernelType::Rbf ? "rbf" : "linear"}, {"bias", bias_}};
    if (kernel_.type == KernelType::Linear) {
        j["weights"] = std::vector<double>(weights_.begin(), weights_.end());
    } else {
        j["gamma"] = kernel_.gamma;
        j["coef"] = std::vector<double>(coef_.begin(), coef_.end());
        j["cols"] = support_.cols();
        j["support"] = std::vector<double>(support_.data(), support_.data() + support_.size());
    }
    return j;
}

SupportVectorMachine SupportVectorMachine::from_json(const nlohmann::json& j) {
    SupportVectorMachine m;
    m.bias_ = j.at("bias").get<double>();
    if (j.at("kernel") == "linear") {
        m.kernel_ = {KernelType::Linear, 1.0};
        auto w = j.at("weights").get<std::vector<double>>();
        m.weights_ = Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    } else {
        m.kernel_ = {KernelType::Rbf, j.at("gamma").get<double>()};
        auto c = j.at("coef").get<std::vector<double>>();
        auto flat = j.at("support").get<std::vector<double>>();
        auto cols = j.at("cols").get<Eigen::Index>();
        m.coef_ = Eigen::Map<Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
        m.support_ = Eigen::Map<FeatureMatrix>(flat.data(), static_cast<Eigen::Index>(c.size()), cols);
    }
    return m;
}

}  // namespace dysa
