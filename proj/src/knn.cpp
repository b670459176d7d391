#include "dysa/knn.hpp"

#include "dysa/error.hpp"

#include <algorithm>

namespace dysa {

NearestNeighbors::NearestNeighbors(FeatureMatrix X, Labels y, int k) : X_(std::move(X)), y_(std::move(y)), k_(k) {
    if (k_ < 1) throw ConfigError("knn: k must be positive");
    if (static_cast<std::size_t>(X_.rows()) != y_.size()) throw DataError("knn: X/y row mismatch");
}

std::vector<std::size_t> NearestNeighbors::neighbors(std::span<const double> x) const {
    const auto n = static_cast<std::size_t>(X_.rows());
    Eigen::Map<const Eigen::RowVectorXd> q(x.data(), static_cast<Eigen::Index>(x.size()));
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i)
        dist[i] = {(X_.row(static_cast<Eigen::Index>(i)) - q).squaredNorm(), i};
    const std::size_t k = std::min(static_cast<std::size_t>(k_), n);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
}

double NearestNeighbors::vote_fraction(std::span<const double> x) const {
    auto nb = neighbors(x);
    std::size_t pos = 0;
    for (auto i : nb) pos += y_[i];
    return static_cast<double>(pos) / static_cast<double>(nb.size());
}

nlohmann::json NearestNeighbors::to_json() const {
    std::vector<double> flat(X_.data(), X_.data() + X_.size());
    return {{"k", k_}, {"rows", X_.rows()}, {"cols", X_.cols()}, {"X", flat}, {"y", y_}};
}

NearestNeighbors NearestNeighbors::from_json(const nlohmann::json& j) {
    auto rows = j.at("rows").get<Eigen::Index>();
    auto cols = j.at("cols").get<Eigen::Index>();
    auto flat = j.at("X").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols) throw DataError("knn: corrupt training matrix");
    FeatureMatrix X = Eigen::Map<FeatureMatrix>(flat.data(), rows, cols);
    return NearestNeighbors(std::move(X), j.at("y").get<Labels>(), j.at("k").get<int>());
}

}  // namespace dysa
