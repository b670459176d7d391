#include "dysa/learners.hpp"

#include "dysa/error.hpp"
#include "dysa/rng.hpp"

#include <cmath>
#include <cstdio>
#include <tuple>

namespace dysa {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* kernel_name(KernelType k) { return k == KernelType::Rbf ? "rbf" : "linear"; }

KernelType parse_kernel(const std::string& s) {
    if (s == "linear") return KernelType::Linear;
    if (s == "rbf") return KernelType::Rbf;
    throw ConfigError("svm: unknown kernel '" + s + "'");
}

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items()) {
        if (key == "family") continue;
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("learner: unexpected hyperparameter '" + key + "' for family " + j.value("family", "?"));
    }
}

}  // namespace

Family family_of(const LearnerSpec& spec) { return static_cast<Family>(spec.index()); }

std::string family_name(Family f) {
    switch (f) {
        case Family::RF: return "RF";
        case Family::KNN: return "KNN";
        case Family::SVM: return "SVM";
        case Family::LR: return "LR";
    }
    return "?";
}

std::string display_name(const LearnerSpec& spec) {
    return std::visit(overloaded{
                          [](const ForestSpec& s) { return "RF, " + std::to_string(s.n_estimators) + " estimators"; },
                          [](const KnnSpec& s) { return "KNN K=" + std::to_string(s.k); },
                          [](const SvmSpec& s) {
                              return std::string(s.kernel == KernelType::Rbf ? "SVM RBF" : "SVM Linear");
                          },
                          [](const LogisticSpec&) { return std::string("LR"); },
                      },
                      spec);
}

std::string spec_key(const LearnerSpec& spec) {
    return std::visit(
        overloaded{
            [](const ForestSpec& s) {
                return "rf:n=" + std::to_string(s.n_estimators) +
                       ":depth=" + (s.max_depth ? std::to_string(*s.max_depth) : "none") +
                       ":seed=" + (s.seed ? std::to_string(*s.seed) : "none");
            },
            [](const KnnSpec& s) { return "knn:k=" + std::to_string(s.k); },
            [](const SvmSpec& s) {
                return std::string("svm:kernel=") + kernel_name(s.kernel) + ":C=" + num(s.cost) +
                       ":gamma=" + (s.gamma ? num(*s.gamma) : "scale") + ":tol=" + num(s.tolerance);
            },
            [](const LogisticSpec& s) {
                return "lr:l2=" + num(s.l2_strength) + ":iter=" + std::to_string(s.max_iterations) +
                       ":tol=" + num(s.tolerance);
            },
        },
        spec);
}

void validate(const LearnerSpec& spec) {
    std::visit(overloaded{
                   [](const ForestSpec& s) {
                       if (s.n_estimators < 1) throw ConfigError("rf: n_estimators must be positive");
                       if (s.max_depth && *s.max_depth < 1) throw ConfigError("rf: max_depth must be positive");
                   },
                   [](const KnnSpec& s) {
                       if (s.k < 1 || s.k % 2 == 0) throw ConfigError("knn: k must be an odd positive integer");
                   },
                   [](const SvmSpec& s) {
                       if (!(s.cost > 0.0)) throw ConfigError("svm: cost must be positive");
                       if (s.gamma && !(*s.gamma > 0.0)) throw ConfigError("svm: gamma must be positive");
                       if (!(s.tolerance > 0.0)) throw ConfigError("svm: tolerance must be positive");
                   },
                   [](const LogisticSpec& s) {
                       if (!(s.l2_strength >= 0.0)) throw ConfigError("lr: l2_strength must be non-negative");
                       if (s.max_iterations < 1) throw ConfigError("lr: max_iterations must be positive");
                       if (!(s.tolerance > 0.0)) throw ConfigError("lr: tolerance must be positive");
                   },
               },
               spec);
}

bool simpler_than(const LearnerSpec& a, const LearnerSpec& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    return std::visit(
        overloaded{
            [&](const ForestSpec& x) {
                const auto& y = std::get<ForestSpec>(b);
                return std::tuple(x.n_estimators, x.max_depth.value_or(INT32_MAX), x.seed.value_or(0)) <
                       std::tuple(y.n_estimators, y.max_depth.value_or(INT32_MAX), y.seed.value_or(0));
            },
            [&](const KnnSpec& x) { return x.k < std::get<KnnSpec>(b).k; },
            [&](const SvmSpec& x) {
                const auto& y = std::get<SvmSpec>(b);
                return std::tuple(static_cast<int>(x.kernel), x.cost, x.gamma.value_or(0.0), x.tolerance) <
                       std::tuple(static_cast<int>(y.kernel), y.cost, y.gamma.value_or(0.0), y.tolerance);
            },
            [&](const LogisticSpec& x) {
                const auto& y = std::get<LogisticSpec>(b);
                return std::tuple(x.l2_strength, x.max_iterations, x.tolerance) <
                       std::tuple(y.l2_strength, y.max_iterations, y.tolerance);
            },
        },
        a);
}

nlohmann::json spec_to_json(const LearnerSpec& spec) {
    return std::visit(overloaded{
                          [](const ForestSpec& s) {
                              nlohmann::json j{{"family", "RF"}, {"n_estimators", s.n_estimators}};
                              j["max_depth"] = s.max_depth ? nlohmann::json(*s.max_depth) : nlohmann::json(nullptr);
                              j["seed"] = s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr);
                              return j;
                          },
                          [](const KnnSpec& s) { return nlohmann::json{{"family", "KNN"}, {"k", s.k}}; },
                          [](const SvmSpec& s) {
                              nlohmann::json j{{"family", "SVM"}, {"kernel", kernel_name(s.kernel)}, {"C", s.cost}};
                              j["gamma"] = s.gamma ? nlohmann::json(*s.gamma) : nlohmann::json("scale");
                              j["tolerance"] = s.tolerance;
                              return j;
                          },
                          [](const LogisticSpec& s) {
                              return nlohmann::json{{"family", "LR"},
                                                    {"l2_strength", s.l2_strength},
                                                    {"max_iterations", s.max_iterations},
                                                    {"tolerance", s.tolerance}};
                          },
                      },
                      spec);
}

LearnerSpec spec_from_json(const nlohmann::json& j) {
    try {
        const std::string family = j.at("family").get<std::string>();
        LearnerSpec spec;
        if (family == "RF") {
            require_keys(j, {"n_estimators", "max_depth", "seed"});
            ForestSpec s;
            s.n_estimators = j.value("n_estimators", s.n_estimators);
            if (j.contains("max_depth") && !j["max_depth"].is_null()) s.max_depth = j["max_depth"].get<int>();
            if (j.contains("seed") && !j["seed"].is_null()) s.seed = j["seed"].get<std::uint64_t>();
            spec = s;
        } else if (family == "KNN") {
            require_keys(j, {"k"});
            spec = KnnSpec{j.value("k", 5)};
        } else if (family == "SVM") {
            require_keys(j, {"kernel", "C", "gamma", "tolerance"});
            SvmSpec s;
            s.kernel = parse_kernel(j.value("kernel", std::string("linear")));
            s.cost = j.value("C", s.cost);
            if (j.contains("gamma")) {
                if (j["gamma"].is_string()) {
                    if (j["gamma"] != "scale") throw ConfigError("svm: gamma must be a number or \"scale\"");
                } else {
                    s.gamma = j["gamma"].get<double>();
                }
            }
            s.tolerance = j.value("tolerance", s.tolerance);
            spec = s;
        } else if (family == "LR") {
            require_keys(j, {"l2_strength", "max_iterations", "tolerance"});
            LogisticSpec s;
            s.l2_strength = j.value("l2_strength", s.l2_strength);
            s.max_iterations = j.value("max_iterations", s.max_iterations);
            s.tolerance = j.value("tolerance", s.tolerance);
            spec = s;
        } else {
            throw ConfigError("learner: unknown family '" + family + "'");
        }
        validate(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("learner: ") + e.what());
    }
}

TrainedModel::TrainedModel(LearnerSpec spec, std::size_t dimension, Scaling scaling, State state)
    : spec_(std::move(spec)), dimension_(dimension), scaling_(std::move(scaling)), state_(std::move(state)) {}

TrainedModel TrainedModel::constant(LearnerSpec spec, std::size_t dimension, std::uint8_t label) {
    TrainedModel m(std::move(spec), dimension, Scaling::identity(dimension), std::monostate{});
    m.constant_ = label;
    return m;
}

void TrainedModel::check_dimension(std::span<const double> x) const {
    if (x.size() != dimension_)
        throw DataError("predict: expected " + std::to_string(dimension_) + " features, got " +
                        std::to_string(x.size()));
}

double TrainedModel::decision_threshold() const {
    return family_of(spec_) == Family::SVM ? 0.0 : 0.5;
}

double TrainedModel::decision_value(std::span<const double> x) const {
    if (constant_) throw DataError("decision_value: model is degenerate (single-class training labels)");
    check_dimension(x);
    if (const auto* rf = std::get_if<RandomForest>(&state_)) return rf->vote_fraction(x);
    Vector z = scaling_.apply(x);
    std::span<const double> zs(z.data(), static_cast<std::size_t>(z.size()));
    return std::visit(overloaded{
                          [](const std::monostate&) -> double { throw DataError("decision_value: empty model"); },
                          [&](const RandomForest& m) { return m.vote_fraction(zs); },
                          [&](const NearestNeighbors& m) { return m.vote_fraction(zs); },
                          [&](const SupportVectorMachine& m) { return m.decision(zs); },
                          [&](const LogisticRegression& m) { return m.probability(zs); },
                      },
                      state_);
}

std::uint8_t TrainedModel::predict(std::span<const double> x) const {
    check_dimension(x);
    if (constant_) return *constant_;
    return decision_value(x) > decision_threshold() ? 1 : 0;
}

nlohmann::json TrainedModel::to_json() const {
    nlohmann::json j{{"format_version", kFormatVersion},
                     {"family", family_name(family_of(spec_))},
                     {"hyperparameters", spec_to_json(spec_)},
                     {"dimension", dimension_},
                     {"scaling", scaling_.to_json()}};
    j["degenerate"] = constant_.has_value();
    if (constant_) {
        j["constant_label"] = *constant_;
        j["state"] = nullptr;
    } else {
        j["state"] = std::visit(overloaded{
                                    [](const std::monostate&) { return nlohmann::json(nullptr); },
                                    [](const auto& m) { return m.to_json(); },
                                },
                                state_);
    }
    return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
    try {
        int version = j.at("format_version").get<int>();
        if (version > kFormatVersion)
            throw DataError("model: format_version " + std::to_string(version) + " is newer than supported");
        LearnerSpec spec = spec_from_json(j.at("hyperparameters"));
        auto dim = j.at("dimension").get<std::size_t>();
        if (j.at("degenerate").get<bool>())
            return constant(std::move(spec), dim, j.at("constant_label").get<std::uint8_t>());
        Scaling scaling = Scaling::from_json(j.at("scaling"));
        const auto& st = j.at("state");
        State state;
        switch (family_of(spec)) {
            case Family::RF: state = RandomForest::from_json(st); break;
            case Family::KNN: state = NearestNeighbors::from_json(st); break;
            case Family::SVM: state = SupportVectorMachine::from_json(st); break;
            case Family::LR: state = LogisticRegression::from_json(st); break;
        }
        return TrainedModel(std::move(spec), dim, std::move(scaling), std::move(state));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model: malformed record: ") + e.what());
    }
}

std::uint64_t TrainedModel::fingerprint() const { return fnv1a(to_json().dump()); }

TrainedModel fit(const LearnerSpec& spec, const FeatureMatrix& X, const Labels& y, std::uint64_t seed) {
    validate(spec);
    const auto n = static_cast<std::size_t>(X.rows());
    const auto d = static_cast<std::size_t>(X.cols());
    if (n < 2) throw DataError("fit: need at least 2 rows");
    if (y.size() != n) throw DataError("fit: X has " + std::to_string(n) + " rows but y has " + std::to_string(y.size()));
    if (!X.allFinite()) throw DataError("fit: non-finite input");
    std::size_t pos = 0;
    for (auto v : y) {
        if (v > 1) throw DataError("fit: labels must be 0 or 1");
        pos += v;
    }
    if (pos == 0 || pos == n) return TrainedModel::constant(spec, d, pos == n ? 1 : 0);

    if (const auto* s = std::get_if<ForestSpec>(&spec)) {
        ForestOptions opt;
        opt.n_estimators = s->n_estimators;
        opt.max_depth = s->max_depth;
        return TrainedModel(spec, d, Scaling::identity(d), RandomForest::fit(X, y, opt, s->seed.value_or(seed)));
    }

    Scaling scaling = Scaling::fit(X);
    FeatureMatrix Z = scaling.apply(X);
    TrainedModel::State state;
    if (const auto* s = std::get_if<KnnSpec>(&spec)) {
        state = NearestNeighbors(std::move(Z), y, s->k);
    } else if (const auto* s = std::get_if<SvmSpec>(&spec)) {
        KernelParams kp{s->kernel, 1.0};
        if (s->kernel == KernelType::Rbf) {
            if (s->gamma) {
                kp.gamma = *s->gamma;
            } else {
                double mean = Z.mean();
                double var = (Z.array() - mean).square().mean();
                kp.gamma = var > 0.0 ? 1.0 / (static_cast<double>(d) * var) : 1.0;
            }
        }
        auto sol = solve_svm_dual(Z, y, kp, s->cost, s->tolerance);
        state = SupportVectorMachine::from_solution(Z, y, kp, sol);
    } else {
        const auto& lr = std::get<LogisticSpec>(spec);
        state = LogisticRegression::fit(Z, y, {lr.l2_strength, lr.max_iterations, lr.tolerance});
    }
    return TrainedModel(spec, d, std::move(scaling), std::move(state));
}

}  // namespace dysa
