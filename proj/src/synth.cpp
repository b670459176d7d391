#include "dysa/synth.hpp"

#include "dysa/error.hpp"
#include "dysa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dysa {

namespace {

// Cut (a half-integer) whose exceedance probability under uniform 0..5
// inputs is closest to one half; ties go to the lower cut.
double balanced_cut(const std::vector<int>& weights) {
    std::vector<double> dist{1.0};
    for (int w : weights) {
        std::vector<double> next(dist.size() + static_cast<std::size_t>(5 * w), 0.0);
        for (std::size_t s = 0; s < dist.size(); ++s)
            for (int v = 0; v <= 5; ++v) next[s + static_cast<std::size_t>(v * w)] += dist[s] / 6.0;
        dist = std::move(next);
    }
    double best_cut = 0.5, best_gap = 2.0, above = 1.0;
    for (std::size_t s = 0; s + 1 < dist.size(); ++s) {
        above -= dist[s];  // P(sum > s)
        double gap = std::abs(above - 0.5);
        if (gap < best_gap) {
            best_gap = gap;
            best_cut = static_cast<double>(s) + 0.5;
        }
    }
    return best_cut;
}

}  // namespace

void PlantSpec::validate() const {
    if (n_students < 1) throw ConfigError("plant: n_students must be positive");
    if (!(label_noise >= 0.0 && label_noise < 0.5)) throw ConfigError("plant: label_noise must be in [0, 0.5)");
    if (label_threshold < kLikertMin || label_threshold >= kLikertMax)
        throw ConfigError("plant: label_threshold must be in [0, 4]");
    for (const auto& [id, rate] : missing_rates)
        if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("plant: missing rate of " + id + " must be in [0, 1]");
}

nlohmann::json PlantSpec::to_json() const {
    return {{"n_students", n_students}, {"label_noise", label_noise}, {"label_threshold", label_threshold},
            {"missing_rates", missing_rates}, {"targets", targets}, {"seed", seed}};
}

PlantSpec PlantSpec::from_json(const nlohmann::json& j) {
    try {
        PlantSpec s;
        s.n_students = j.value("n_students", s.n_students);
        s.label_noise = j.value("label_noise", s.label_noise);
        s.label_threshold = j.value("label_threshold", s.label_threshold);
        if (j.contains("missing_rates")) s.missing_rates = j["missing_rates"].get<std::map<std::string, double>>();
        s.targets = j.value("targets", s.targets);
        s.seed = j.value("seed", s.seed);
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("plant spec: ") + e.what());
    }
}

bool PlantedRule::apply(std::span<const double> difficulties) const {
    double s = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) s += weights[i] * difficulties[inputs[i]];
    return s > cut;
}

const PlantedRule& SynthManifest::rule(const std::string& target) const {
    for (const auto& r : rules)
        if (r.target == target) return r;
    throw DataError("manifest: no rule for target " + target);
}

nlohmann::json SynthManifest::to_json(const FeatureCatalog& catalog) const {
    auto diff = catalog.difficulty_ids();
    auto rs = nlohmann::json::array();
    for (const auto& r : rules) {
        std::vector<std::string> ids;
        for (auto i : r.inputs) ids.push_back(diff[i]);
        rs.push_back({{"target", r.target}, {"inputs", ids}, {"weights", r.weights}, {"cut", r.cut},
                      {"bayes_rate", r.bayes_rate}, {"rule_ccr", r.rule_ccr}});
    }
    return {{"spec", spec.to_json()}, {"rules", rs}};
}

SynthManifest SynthManifest::from_json(const nlohmann::json& j, const FeatureCatalog& catalog) {
    try {
        SynthManifest m;
        m.spec = PlantSpec::from_json(j.at("spec"));
        auto diff = catalog.difficulty_ids();
        for (const auto& r : j.at("rules")) {
            PlantedRule rule;
            rule.target = r.at("target").get<std::string>();
            for (const auto& id : r.at("inputs").get<std::vector<std::string>>()) {
                auto it = std::find(diff.begin(), diff.end(), id);
                if (it == diff.end()) throw DataError("manifest: unknown difficulty " + id);
                rule.inputs.push_back(static_cast<std::size_t>(it - diff.begin()));
            }
            rule.weights = r.at("weights").get<std::vector<int>>();
            rule.cut = r.at("cut").get<double>();
            rule.bayes_rate = r.at("bayes_rate").get<double>();
            rule.rule_ccr = r.at("rule_ccr").get<double>();
            m.rules.push_back(std::move(rule));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("manifest: ") + e.what());
    }
}

SynthOutput generate(const PlantSpec& spec, const FeatureCatalog& catalog) {
    spec.validate();
    const auto targets = spec.targets.empty() ? catalog.target_ids() : spec.targets;
    for (const auto& t : targets) {
        auto kind = catalog.kind_of(t);
        if (!kind || *kind == FeatureKind::Difficulty) throw ConfigError("plant: " + t + " is not a catalog target");
    }
    for (const auto& [id, rate] : spec.missing_rates)
        if (!catalog.contains(id)) throw ConfigError("plant: unknown column " + id + " in missing_rates");

    const std::size_t n = spec.n_students;
    const std::size_t d = FeatureCatalog::kDifficulties;

    std::vector<std::string> columns = catalog.difficulty_ids();
    for (auto& t : catalog.target_ids()) columns.push_back(std::move(t));

    std::vector<SurveyRecord> records(n);
    std::vector<std::vector<double>> inputs(n, std::vector<double>(d));
    Rng input_rng(derive_seed(spec.seed, "inputs"));
    for (std::size_t s = 0; s < n; ++s) {
        records[s].student_id = "s" + std::to_string(s + 1);
        records[s].answers.assign(columns.size(), std::nullopt);
        for (std::size_t j = 0; j < d; ++j) {
            int v = input_rng.between(kLikertMin, kLikertMax);
            inputs[s][j] = v;
            records[s].answers[j] = static_cast<std::uint8_t>(v);
        }
    }

    SynthManifest manifest{spec, {}};
    for (const auto& target : targets) {
        Rng rng(derive_seed(spec.seed, "target:" + target));
        PlantedRule rule;
        rule.target = target;
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        const auto k = static_cast<std::size_t>(rng.between(2, 4));
        rule.inputs.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(rule.inputs.begin(), rule.inputs.end());
        for (std::size_t i = 0; i < k; ++i) rule.weights.push_back(rng.between(1, 3));
        rule.cut = balanced_cut(rule.weights);
        rule.bayes_rate = 1.0 - spec.label_noise;

        const std::size_t col = std::find(columns.begin(), columns.end(), target) - columns.begin();
        std::size_t agree = 0;
        for (std::size_t s = 0; s < n; ++s) {
            bool clean = rule.apply(inputs[s]);
            bool label = clean != rng.bernoulli(spec.label_noise);
            agree += clean == label;
            int value = label ? rng.between(spec.label_threshold + 1, kLikertMax)
                              : rng.between(kLikertMin, spec.label_threshold);
            records[s].answers[col] = static_cast<std::uint8_t>(value);
        }
        rule.rule_ccr = static_cast<double>(agree) / static_cast<double>(n);
        manifest.rules.push_back(std::move(rule));
    }

    for (const auto& [id, rate] : spec.missing_rates) {
        if (rate <= 0.0) continue;
        Rng rng(derive_seed(spec.seed, "missing:" + id));
        const std::size_t col = std::find(columns.begin(), columns.end(), id) - columns.begin();
        for (auto& rec : records)
            if (rng.bernoulli(rate)) rec.answers[col] = std::nullopt;
    }

    return {Dataset(catalog, std::move(records)), std::move(manifest)};
}

}  // namespace dysa
