#pragma once

#include "dysa/survey.hpp"

#include <json.hpp>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dysa {

/// Parameters of a planted synthetic survey.
struct PlantSpec {
    std::size_t n_students = 719;
    double label_noise = 0.07;         ///< flip probability in [0, 0.5)
    int label_threshold = 1;           ///< targets are planted around this cut
    std::map<std::string, double> missing_rates{{"T4", 0.6}};
    std::vector<std::string> targets;  ///< empty -> every catalog target
    std::uint64_t seed = 42;

    void validate() const;
    nlohmann::json to_json() const;
    static PlantSpec from_json(const nlohmann::json& j);
};

/// useful <=> sum_i weights[i] * difficulty[inputs[i]] > cut
struct PlantedRule {
    std::string target;
    std::vector<std::size_t> inputs;  ///< difficulty column indices (0 = P1)
    std::vector<int> weights;
    double cut = 0.0;
    double bayes_rate = 1.0;  ///< 1 - label_noise
    double rule_ccr = 1.0;    ///< agreement of the rule with the generated labels

    bool apply(std::span<const double> difficulties) const;
};

struct SynthManifest {
    PlantSpec spec;
    std::vector<PlantedRule> rules;

    const PlantedRule& rule(const std::string& target) const;
    nlohmann::json to_json(const FeatureCatalog& catalog) const;
    static SynthManifest from_json(const nlohmann::json& j, const FeatureCatalog& catalog);
};

struct SynthOutput {
    Dataset dataset;  ///< raw, nothing dropped yet
    SynthManifest manifest;
};

/// Difficulties uniform on 0..5. Each target gets a linear-threshold rule
/// over 2-4 difficulties with weights in 1..3 and a cut placed near the
/// median of the weighted sum; the rule's label is flipped with probability
/// label_noise, and the Likert value is drawn uniformly above the label
/// threshold for label 1 and at or below it for label 0. Cells are then
/// blanked per missing_rates. Deterministic in spec.seed.
SynthOutput generate(const PlantSpec& spec, const FeatureCatalog& catalog = FeatureCatalog::standard());

}  // namespace dysa
