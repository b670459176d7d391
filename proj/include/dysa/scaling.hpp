#pragma once

#include "dysa/types.hpp"

#include <json.hpp>
#include <span>

namespace dysa {

/// Per-feature affine map x -> (x - mean) / scale, learned on training rows.
/// Columns whose training values are all 0/1 pass through unchanged
/// (mean 0, scale 1); constant columns are centred only.
struct Scaling {
    Vector mean;
    Vector scale;

    static Scaling identity(std::size_t d);
    static Scaling fit(const FeatureMatrix& X);

    FeatureMatrix apply(const FeatureMatrix& X) const;
    Vector apply(std::span<const double> x) const;

    nlohmann::json to_json() const;
    static Scaling from_json(const nlohmann::json& j);
};

}  // namespace dysa
