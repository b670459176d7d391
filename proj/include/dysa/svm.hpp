#pragma once

#include "dysa/types.hpp"

#include <json.hpp>
#include <span>

namespace dysa {

enum class KernelType { Linear, Rbf };

struct KernelParams {
    KernelType type = KernelType::Linear;
    double gamma = 1.0;  ///< used by Rbf only
};

/// exp(-gamma * |a - b|^2)
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);
double kernel_value(const KernelParams& k, std::span<const double> a, std::span<const double> b);

/// Full Gram matrix of the rows of X.
Eigen::MatrixXd gram_matrix(const FeatureMatrix& X, const KernelParams& k);

/// Solution of the soft-margin dual
///   min 1/2 a'Qa - e'a   s.t. 0 <= a_i <= C, sum a_i s_i = 0,
/// with s_i = +1 for label 1 and -1 for label 0, Q_ij = s_i s_j K(x_i, x_j).
/// Decision function: f(x) = sum a_i s_i K(x_i, x) + bias.
struct SvmDualSolution {
    Vector alpha;
    double bias = 0.0;
    long iterations = 0;
    bool converged = false;
};

/// Sequential minimal optimisation with second-order working-set selection.
/// Stops when the maximal KKT violation between the two index sets drops
/// below tolerance.
SvmDualSolution solve_svm_dual(const FeatureMatrix& X, const Labels& y, const KernelParams& kernel, double cost,
                               double tolerance);

class SupportVectorMachine {
public:
    SupportVectorMachine() = default;

    static SupportVectorMachine from_solution(const FeatureMatrix& X, const Labels& y, const KernelParams& kernel,
                                              const SvmDualSolution& sol);

    /// Signed margin value f(x); label 1 iff f(x) > 0.
    double decision(std::span<const double> x) const;

    const KernelParams& kernel() const { return kernel_; }
    std::size_t support_vector_count() const { return static_cast<std::size_t>(coef_.size()); }

    nlohmann::json to_json() const;
    static SupportVectorMachine from_json(const nlohmann::json& j);

private:
    KernelParams kernel_;
    FeatureMatrix support_;  ///< Rbf only
    Vector coef_;            ///< a_i s_i per support vector
    Vector weights_;         ///< Linear only: sum a_i s_i x_i
    double bias_ = 0.0;
};

}  // namespace dysa
