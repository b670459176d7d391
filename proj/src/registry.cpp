#include "dysa/registry.hpp"

#include "dysa/error.hpp"
#include "dysa/io.hpp"
#include "dysa/rng.hpp"

#include <map>

namespace dysa {

std::uint8_t RegistryEntry::predict(std::span<const double> difficulties) const {
    if (models.empty()) throw DataError("registry: target " + target + " has no model");
    std::vector<double> x(difficulties.begin(), difficulties.end());
    for (double v : x)
        if (!(v >= kLikertMin && v <= kLikertMax)) throw DataError("registry: difficulty values must be in [0, 5]");
    if (config.inputs_binarized)
        for (double& v : x) v = v > config.threshold ? 1.0 : 0.0;
    if (models.size() == 1) return models.front().model.predict(x);
    return consensus_predict(models, x);
}

nlohmann::json ModelRegistry::to_json() const {
    auto es = nlohmann::json::array();
    for (const auto& e : entries) {
        auto ms = nlohmann::json::array();
        for (const auto& m : e.models) ms.push_back({{"cv_ccr", m.cv_ccr}, {"model", m.model.to_json()}});
        es.push_back({{"target", e.target}, {"config", config_to_json(e.config)}, {"models", ms}});
    }
    return {{"format_version", kFormatVersion}, {"entries", es}};
}

ModelRegistry ModelRegistry::from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() > kFormatVersion) throw DataError("registry: unsupported format_version");
        ModelRegistry r;
        for (const auto& e : j.at("entries")) {
            RegistryEntry entry;
            entry.target = e.at("target").get<std::string>();
            entry.config = config_from_json(e.at("config"));
            for (const auto& m : e.at("models"))
                entry.models.push_back({TrainedModel::from_json(m.at("model")), m.at("cv_ccr").get<double>()});
            r.entries.push_back(std::move(entry));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("registry: malformed: ") + e.what());
    }
}

void ModelRegistry::save(const std::filesystem::path& path) const { write_file_atomic(path, to_json().dump() + "\n"); }

ModelRegistry ModelRegistry::load(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("registry: " + path.string() + ": " + e.what());
    }
}

ModelRegistry build_registry(const Dataset& dataset, const EvaluationReport& report, std::uint64_t seed,
                             ImputePolicy impute) {
    ModelRegistry reg;
    std::map<std::pair<int, bool>, BinaryView> views;
    for (const auto& r : report.results) {
        if (r.error) continue;
        const auto& c = r.best_config;
        auto key = std::pair{c.threshold, c.inputs_binarized};
        if (!views.contains(key)) views.emplace(key, binarize(dataset, c.threshold, c.inputs_binarized, impute));
        const BinaryView& view = views.at(key);

        auto rows = view.observed_rows(r.target);
        const auto& lab = view.labels(r.target);
        FeatureMatrix X(static_cast<Eigen::Index>(rows.size()), view.X.cols());
        Labels y(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            X.row(static_cast<Eigen::Index>(i)) = view.X.row(static_cast<Eigen::Index>(rows[i]));
            y[i] = static_cast<std::uint8_t>(lab[rows[i]]);
        }

        std::vector<PipelineConfig> members;
        if (c.use_consensus) {
            for (const auto& m : c.members) members.push_back({c.threshold, c.inputs_binarized, m, false, {}});
        } else {
            members.push_back(c);
        }
        RegistryEntry entry{r.target, c, {}};
        const auto tseed = target_seed(seed, r.target);
        for (const auto& m : members) {
            double score = r.mean_ccr;
            for (const auto& e : r.evaluated)
                if (e.config == m) score = e.mean_ccr;
            auto model = fit(m.learner, X, y, derive_seed(derive_seed(tseed, config_key(m)), "full"));
            entry.models.push_back({std::move(model), score});
        }
        reg.entries.push_back(std::move(entry));
    }
    return reg;
}

}  // namespace dysa
