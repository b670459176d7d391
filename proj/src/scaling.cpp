#include "dysa/scaling.hpp"

#include <cmath>

namespace dysa {

Scaling Scaling::identity(std::size_t d) {
    auto n = static_cast<Eigen::Index>(d);
    return {Vector::Zero(n), Vector::Ones(n)};
}

Scaling Scaling::fit(const FeatureMatrix& X) {
    Scaling s = identity(static_cast<std::size_t>(X.cols()));
    const auto n = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        auto col = X.col(j);
        bool binary = (col.array() == 0.0 || col.array() == 1.0).all();
        if (binary) continue;
        double mean = col.mean();
        double var = (col.array() - mean).square().sum() / n;
        s.mean(j) = mean;
        s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

FeatureMatrix Scaling::apply(const FeatureMatrix& X) const {
    FeatureMatrix out = X;
    out.rowwise() -= mean.transpose();
    out.array().rowwise() /= scale.transpose().array();
    return out;
}

Vector Scaling::apply(std::span<const double> x) const {
    Vector v = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
    return ((v - mean).array() / scale.array()).matrix();
}

nlohmann::json Scaling::to_json() const {
    return {{"mean", std::vector<double>(mean.begin(), mean.end())},
            {"scale", std::vector<double>(scale.begin(), scale.end())}};
}

Scaling Scaling::from_json(const nlohmann::json& j) {
    auto m = j.at("mean").get<std::vector<double>>();
    auto s = j.at("scale").get<std::vector<double>>();
    return {Eigen::Map<Vector>(m.data(), static_cast<Eigen::Index>(m.size())),
            Eigen::Map<Vector>(s.data(), static_cast<Eigen::Index>(s.size()))};
}

}  // namespace dysa
