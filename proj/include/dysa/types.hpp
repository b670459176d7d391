#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace dysa {

/// Row-major feature matrix: one row per student.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Binary labels, each 0 or 1.
using Labels = std::vector<std::uint8_t>;

}  // namespace dysa
