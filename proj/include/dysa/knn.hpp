#pragma once

#include "dysa/types.hpp"

#include <json.hpp>
#include <span>
#include <vector>

namespace dysa {

/// Brute-force k-nearest-neighbour classifier over Euclidean distance.
/// Equal distances are admitted by ascending training index.
class NearestNeighbors {
public:
    NearestNeighbors() = default;
    NearestNeighbors(FeatureMatrix X, Labels y, int k);

    /// Training indices of the k nearest rows, nearest first.
    std::vector<std::size_t> neighbors(std::span<const double> x) const;

    /// Fraction of the k neighbours labelled 1.
    double vote_fraction(std::span<const double> x) const;

    int k() const { return k_; }

    nlohmann::json to_json() const;
    static NearestNeighbors from_json(const nlohmann::json& j);

private:
    FeatureMatrix X_;
    Labels y_;
    int k_ = 1;
};

}  // namespace dysa
