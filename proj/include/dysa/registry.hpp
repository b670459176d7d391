#pragma once

#include "dysa/selection.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dysa {

/// The selected model(s) of one target, refitted on every answered row.
struct RegistryEntry {
    std::string target;
    PipelineConfig config;
    std::vector<ConsensusMember> models;  ///< one model, or the consensus voters

    /// Takes raw 0-5 difficulty answers; binarizes them first when the
    /// configuration uses binary inputs.
    std::uint8_t predict(std::span<const double> difficulties) const;
};

struct ModelRegistry {
    static constexpr int kFormatVersion = 1;
    std::vector<RegistryEntry> entries;

    nlohmann::json to_json() const;
    static ModelRegistry from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static ModelRegistry load(const std::filesystem::path& path);
};

/// Refits each target's winning configuration on the full dataset.
ModelRegistry build_registry(const Dataset& dataset, const EvaluationReport& report, std::uint64_t seed,
                             ImputePolicy impute = ImputePolicy::DropRow);

}  // namespace dysa
