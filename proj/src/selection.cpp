#include "dysa/selection.hpp"

#include "dysa/error.hpp"
#include "dysa/rng.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace dysa {

std::string input_name(bool inputs_binarized) { return inputs_binarized ? "Binary" : "Numeric"; }

std::string config_label(const PipelineConfig& c) {
    std::string s = display_name(c.learner) + " | Thr " + std::to_string(c.threshold) + " | " +
                    input_name(c.inputs_binarized);
    if (c.use_consensus) {
        s += " | Cons [";
        for (std::size_t i = 0; i < c.members.size(); ++i) s += (i ? ", " : "") + display_name(c.members[i]);
        s += "]";
    }
    return s;
}

std::string config_key(const PipelineConfig& c) {
    return "thr=" + std::to_string(c.threshold) + ":in=" + (c.inputs_binarized ? "binary" : "numeric") + ":" +
           spec_key(c.learner);
}

nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j{{"threshold", c.threshold},
                     {"inputs", c.inputs_binarized ? "binary" : "numeric"},
                     {"learner", spec_to_json(c.learner)},
                     {"consensus", c.use_consensus}};
    if (c.use_consensus) {
        auto m = nlohmann::json::array();
        for (const auto& s : c.members) m.push_back(spec_to_json(s));
        j["members"] = m;
    }
    return j;
}

namespace {

bool parse_inputs(const nlohmann::json& v) {
    auto s = v.get<std::string>();
    if (s == "binary") return true;
    if (s == "numeric") return false;
    throw ConfigError("inputs must be \"numeric\" or \"binary\", got \"" + s + "\"");
}

void check_threshold(int t) {
    if (t < kLikertMin || t > kLikertMax) throw ConfigError("threshold must be in [0, 5], got " + std::to_string(t));
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j) {
    try {
        PipelineConfig c;
        c.threshold = j.at("threshold").get<int>();
        check_threshold(c.threshold);
        c.inputs_binarized = parse_inputs(j.at("inputs"));
        c.learner = spec_from_json(j.at("learner"));
        c.use_consensus = j.value("consensus", false);
        if (j.contains("members"))
            for (const auto& m : j["members"]) c.members.push_back(spec_from_json(m));
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

bool config_less(const PipelineConfig& a, const PipelineConfig& b) {
    if (simpler_than(a.learner, b.learner)) return true;
    if (simpler_than(b.learner, a.learner)) return false;
    return std::tuple(a.threshold, a.inputs_binarized, a.use_consensus) <
           std::tuple(b.threshold, b.inputs_binarized, b.use_consensus);
}

Grid Grid::standard() {
    Grid g;
    g.learners = {ForestSpec{50, std::nullopt, std::nullopt},
                  KnnSpec{5},
                  KnnSpec{7},
                  KnnSpec{9},
                  KnnSpec{11},
                  SvmSpec{KernelType::Linear, 1.0, std::nullopt, 1e-3},
                  SvmSpec{KernelType::Rbf, 1.0, std::nullopt, 1e-3},
                  LogisticSpec{}};
    return g;
}

std::vector<PipelineConfig> Grid::expand() const {
    if (learners.empty()) throw ConfigError("grid: no learners");
    if (thresholds.empty() || encodings.empty()) throw ConfigError("grid: no thresholds or encodings");
    std::vector<PipelineConfig> out;
    for (int t : thresholds) {
        check_threshold(t);
        for (bool enc : encodings) {
            for (const auto& l : learners) out.push_back({t, enc, l, false, {}});
            if (consensus) out.push_back({t, enc, learners.front(), true, {}});
        }
    }
    return out;
}

nlohmann::json Grid::to_json() const {
    auto ls = nlohmann::json::array();
    for (const auto& l : learners) ls.push_back(spec_to_json(l));
    auto enc = nlohmann::json::array();
    for (bool e : encodings) enc.push_back(e ? "binary" : "numeric");
    return {{"thresholds", thresholds}, {"inputs", enc}, {"learners", ls}, {"consensus", consensus}};
}

Grid Grid::from_json(const nlohmann::json& j) {
    try {
        Grid g = standard();
        if (j.contains("thresholds")) g.thresholds = j["thresholds"].get<std::vector<int>>();
        if (j.contains("inputs")) {
            g.encodings.clear();
            for (const auto& e : j["inputs"]) g.encodings.push_back(parse_inputs(e));
        }
        if (j.contains("learners")) {
            g.learners.clear();
            for (const auto& l : j["learners"]) g.learners.push_back(spec_from_json(l));
        }
        g.consensus = j.value("consensus", g.consensus);
        for (int t : g.thresholds) check_threshold(t);
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

double ccr(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted) {
    if (truth.size() != predicted.size())
        throw DataError("ccr: length mismatch (" + std::to_string(truth.size()) + " vs " +
                        std::to_string(predicted.size()) + ")");
    if (truth.empty()) throw DataError("ccr: empty label vectors");
    std::size_t agree = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) agree += truth[i] == predicted[i];
    return static_cast<double>(agree) / static_cast<double>(truth.size());
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (assignment[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (assignment[i] != fold) out.push_back(i);
    return out;
}

FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("make_folds: k must be at least 2");
    if (n < k) throw DataError("make_folds: " + std::to_string(n) + " records cannot fill " + std::to_string(k) + " folds");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(perm);
    FoldPlan plan{n, k, seed, std::vector<std::size_t>(n)};
    const std::size_t base = n / k, extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) plan.assignment[perm[pos++]] = f;
    }
    return plan;
}

FoldPlan target_folds(std::size_t n_answered, std::uint64_t tseed, std::size_t k) {
    return make_folds(n_answered, k, derive_seed(tseed, "folds"));
}

std::uint64_t target_seed(std::uint64_t seed, const std::string& target) { return derive_seed(seed, target); }

namespace {

struct TargetData {
    std::vector<std::size_t> rows;
    Labels y;
};

TargetData answered(const BinaryView& view, const std::string& target) {
    TargetData td;
    td.rows = view.observed_rows(target);
    const auto& lab = view.labels(target);
    for (auto r : td.rows) td.y.push_back(static_cast<std::uint8_t>(lab[r]));
    return td;
}

void finish(CvOutcome& out, const FoldPlan& plan) {
    out.fold_ccr.clear();
    out.fold_positive_rate.clear();
    for (std::size_t f = 0; f < plan.k; ++f) {
        std::vector<std::uint8_t> t, p;
        for (std::size_t i = 0; i < plan.n; ++i) {
            if (plan.assignment[i] != f) continue;
            t.push_back(out.truth[i]);
            p.push_back(out.predictions[i]);
        }
        out.fold_ccr.push_back(ccr(t, p));
        out.fold_positive_rate.push_back(static_cast<double>(std::accumulate(t.begin(), t.end(), 0)) /
                                         static_cast<double>(t.size()));
    }
    out.mean_ccr = std::accumulate(out.fold_ccr.begin(), out.fold_ccr.end(), 0.0) /
                   static_cast<double>(out.fold_ccr.size());
    out.pooled_ccr = ccr(out.truth, out.predictions);
    out.positive_rate = static_cast<double>(std::accumulate(out.truth.begin(), out.truth.end(), 0)) /
                        static_cast<double>(out.truth.size());
}

void check_view(const PipelineConfig& config, const BinaryView& view) {
    if (config.threshold != view.threshold || config.inputs_binarized != view.inputs_binarized)
        throw ConfigError("cross_validate: configuration (" + config_label(config) +
                          ") does not match the view's threshold/encoding");
}

}  // namespace

CvOutcome cross_validate(const PipelineConfig& config, const BinaryView& view, const std::string& target,
                         const FoldPlan& plan, std::uint64_t tseed, const CvOptions& options) {
    if (config.use_consensus) {
        std::vector<PipelineConfig> members;
        for (const auto& m : config.members) members.push_back({config.threshold, config.inputs_binarized, m, false, {}});
        return consensus_cv(members, view, target, plan, tseed);
    }
    check_view(config, view);
    TargetData td = answered(view, target);
    if (td.rows.size() != plan.n)
        throw ConfigError("cross_validate: fold plan covers " + std::to_string(plan.n) + " rows, target " + target +
                          " has " + std::to_string(td.rows.size()));

    CvOutcome out;
    out.rows = td.rows;
    out.truth = td.y;
    out.predictions.assign(plan.n, 0);
    const std::uint64_t cseed = derive_seed(tseed, config_key(config));
    const auto d = view.X.cols();
    for (std::size_t f = 0; f < plan.k; ++f) {
        auto train = plan.train_indices(f);
        FeatureMatrix Xtr(static_cast<Eigen::Index>(train.size()), d);
        Labels ytr(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            Xtr.row(static_cast<Eigen::Index>(i)) = view.X.row(static_cast<Eigen::Index>(td.rows[train[i]]));
            ytr[i] = td.y[train[i]];
        }
        TrainedModel model = fit(config.learner, Xtr, ytr, derive_seed(cseed, static_cast<std::uint64_t>(f)));
        if (model.degenerate()) ++out.degenerate_folds;
        if (options.record_fingerprints) out.fold_fingerprints.push_back(model.fingerprint());
        for (auto i : plan.test_indices(f))
            out.predictions[i] = model.predict(row_span(view.X, static_cast<Eigen::Index>(td.rows[i])));
    }
    finish(out, plan);
    return out;
}

CvOutcome cross_validate(const PipelineConfig& config, const BinaryView& view, const std::string& target,
                         std::uint64_t tseed) {
    auto n = view.observed_rows(target).size();
    return cross_validate(config, view, target, target_folds(n, tseed), tseed);
}

std::uint8_t consensus_vote(std::span<const std::uint8_t> votes, std::span<const double> scores) {
    if (votes.empty()) throw ConfigError("consensus: no voters");
    if (votes.size() != scores.size()) throw ConfigError("consensus: votes and scores differ in length");
    std::size_t ones = 0;
    for (auto v : votes) ones += v;
    const std::size_t zeros = votes.size() - ones;
    if (ones != zeros) return ones > zeros ? 1 : 0;
    double top = *std::max_element(scores.begin(), scores.end());
    std::optional<std::uint8_t> label;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        if (scores[i] != top) continue;
        if (label && *label != votes[i]) return 0;
        label = votes[i];
    }
    return *label;
}

std::uint8_t consensus_predict(std::span<const ConsensusMember> members, std::span<const double> x) {
    if (members.empty()) throw ConfigError("consensus: empty model list");
    std::vector<std::uint8_t> votes;
    std::vector<double> scores;
    for (const auto& m : members) {
        if (m.model.dimension() != members.front().model.dimension())
            throw ConfigError("consensus: members differ in dimensionality");
        votes.push_back(m.model.predict(x));
        scores.push_back(m.cv_ccr);
    }
    return consensus_vote(votes, scores);
}

namespace {

CvOutcome vote_outcomes(const std::vector<const CvOutcome*>& outcomes, const FoldPlan& plan) {
    CvOutcome out;
    out.rows = outcomes.front()->rows;
    out.truth = outcomes.front()->truth;
    out.predictions.resize(plan.n);
    std::vector<double> scores;
    for (const auto* o : outcomes) {
        scores.push_back(o->mean_ccr);
        out.degenerate_folds = std::max(out.degenerate_folds, o->degenerate_folds);
    }
    std::vector<std::uint8_t> votes(outcomes.size());
    for (std::size_t i = 0; i < plan.n; ++i) {
        for (std::size_t m = 0; m < outcomes.size(); ++m) votes[m] = outcomes[m]->predictions[i];
        out.predictions[i] = consensus_vote(votes, scores);
    }
    finish(out, plan);
    return out;
}

}  // namespace

CvOutcome consensus_cv(const std::vector<PipelineConfig>& members, const BinaryView& view, const std::string& target,
                       const FoldPlan& plan, std::uint64_t tseed) {
    if (members.empty()) throw ConfigError("consensus_cv: no members");
    for (const auto& m : members) {
        if (m.threshold != members.front().threshold || m.inputs_binarized != members.front().inputs_binarized)
            throw ConfigError("consensus_cv: members must share threshold and input encoding");
        if (m.use_consensus) throw ConfigError("consensus_cv: members cannot themselves be consensus configurations");
    }
    std::vector<CvOutcome> outcomes;
    for (const auto& m : members) outcomes.push_back(cross_validate(m, view, target, plan, tseed));
    std::vector<const CvOutcome*> ptrs;
    for (const auto& o : outcomes) ptrs.push_back(&o);
    return vote_outcomes(ptrs, plan);
}

TargetResult grid_search(const Dataset& dataset, const std::string& target, const std::vector<PipelineConfig>& grid,
                         std::uint64_t seed, ImputePolicy impute) {
    if (grid.empty()) throw ConfigError("grid_search: empty grid");
    if (!dataset.is_active_target(target)) throw DataError("grid_search: target " + target + " is not active");

    std::map<std::pair<int, bool>, BinaryView> views;
    auto view_for = [&](int thr, bool enc) -> const BinaryView& {
        auto key = std::pair{thr, enc};
        auto it = views.find(key);
        if (it == views.end()) it = views.emplace(key, binarize(dataset, thr, enc, impute)).first;
        return it->second;
    };

    const std::uint64_t tseed = target_seed(seed, target);
    const auto& first_view = view_for(grid.front().threshold, grid.front().inputs_binarized);
    const std::size_t n = first_view.observed_rows(target).size();
    const FoldPlan plan = target_folds(n, tseed);

    struct Entry {
        PipelineConfig config;
        CvOutcome outcome;
    };
    std::vector<Entry> entries;
    entries.reserve(grid.size());
    for (const auto& c : grid) {
        if (c.use_consensus) continue;
        entries.push_back({c, cross_validate(c, view_for(c.threshold, c.inputs_binarized), target, plan, tseed)});
    }
    for (const auto& c : grid) {
        if (!c.use_consensus) continue;
        // Best member of each family sharing this threshold and encoding.
        std::map<Family, const Entry*> best;
        for (const auto& e : entries) {
            if (e.config.threshold != c.threshold || e.config.inputs_binarized != c.inputs_binarized) continue;
            auto fam = family_of(e.config.learner);
            auto it = best.find(fam);
            if (it == best.end() || e.outcome.mean_ccr > it->second->outcome.mean_ccr ||
                (e.outcome.mean_ccr == it->second->outcome.mean_ccr && config_less(e.config, it->second->config)))
                best[fam] = &e;
        }
        if (best.size() < 2) continue;
        std::vector<const CvOutcome*> outcomes;
        PipelineConfig cons{c.threshold, c.inputs_binarized, best.begin()->second->config.learner, true, {}};
        double top = -1.0;
        for (const auto& [fam, e] : best) {
            outcomes.push_back(&e->outcome);
            cons.members.push_back(e->config.learner);
            if (e->outcome.mean_ccr > top) {
                top = e->outcome.mean_ccr;
                cons.learner = e->config.learner;
            }
        }
        CvOutcome voted = vote_outcomes(outcomes, plan);
        entries.push_back({std::move(cons), std::move(voted)});
    }
    if (entries.empty()) throw ConfigError("grid_search: grid produced no evaluable configuration");

    const Entry* winner = &entries.front();
    for (const auto& e : entries) {
        if (e.outcome.mean_ccr > winner->outcome.mean_ccr ||
            (e.outcome.mean_ccr == winner->outcome.mean_ccr && config_less(e.config, winner->config)))
            winner = &e;
    }

    TargetResult r;
    r.target = target;
    r.best_config = winner->config;
    r.mean_ccr = winner->outcome.mean_ccr;
    r.per_fold_ccr = winner->outcome.fold_ccr;
    r.pooled_ccr = winner->outcome.pooled_ccr;
    r.positive_rate = winner->outcome.positive_rate;
    r.baseline_ccr = std::max(r.positive_rate, 1.0 - r.positive_rate);
    r.fold_positive_rate = winner->outcome.fold_positive_rate;
    r.degenerate_folds = winner->outcome.degenerate_folds;
    r.n_rows = n;
    for (const auto& e : entries) r.evaluated.push_back({e.config, e.outcome.mean_ccr});
    return r;
}

double EvaluationReport::overall_mean_ccr() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : results) {
        if (r.error) continue;
        sum += r.mean_ccr;
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

void summarize(EvaluationReport& report, const FeatureCatalog& catalog) {
    double tools = 0.0, strategies = 0.0;
    report.tools_count = report.strategies_count = report.tools_above_90 = report.strategies_above_90 = 0;
    for (const auto& r : report.results) {
        if (r.error) continue;
        bool is_tool = catalog.kind_of(r.target) == FeatureKind::Tool;
        (is_tool ? tools : strategies) += r.mean_ccr;
        ++(is_tool ? report.tools_count : report.strategies_count);
        if (r.mean_ccr > 0.90) ++(is_tool ? report.tools_above_90 : report.strategies_above_90);
    }
    report.tools_mean_ccr = report.tools_count ? tools / static_cast<double>(report.tools_count) : 0.0;
    report.strategies_mean_ccr =
        report.strategies_count ? strategies / static_cast<double>(report.strategies_count) : 0.0;
}

std::uint64_t dataset_fingerprint(const Dataset& dataset) {
    std::ostringstream os;
    for (const auto& id : dataset.columns()) os << id << ',';
    os << '\n';
    for (const auto& rec : dataset.records()) {
        os << rec.student_id;
        for (const auto& a : rec.answers) os << ',' << (a ? static_cast<int>(*a) : -1);
        os << '\n';
    }
    for (const auto& [id, rate] : dataset.dropped_targets()) os << "drop:" << id << '\n';
    return fnv1a(os.str());
}

EvaluationReport run_all_targets(const Dataset& dataset, const Grid& grid, std::uint64_t seed,
                                 const RunOptions& options) {
    const auto configs = grid.expand();
    const auto targets = dataset.active_targets();
    EvaluationReport report;
    report.results.resize(targets.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < targets.size(); i = next++) {
            try {
                report.results[i] = grid_search(dataset, targets[i], configs, seed, options.impute);
            } catch (const Error& e) {
                TargetResult failed;
                failed.target = targets[i];
                failed.error = e.what();
                report.results[i] = std::move(failed);
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, targets.size()));
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    summarize(report, dataset.catalog());
    char fp[17];
    std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(dataset_fingerprint(dataset)));
    report.metadata = {
        {"seed", seed},
        {"grid", grid.to_json()},
        {"dataset_fingerprint", fp},
        {"records", dataset.size()},
        {"folds", 10},
        {"fold_scheme", "shuffled, not stratified"},
        {"ccr", "mean of per-fold CCR; pooled CCR also reported"},
        {"consensus_membership", "best cross-validated member of each learner family under the shared threshold and input encoding"},
        {"consensus_tie_rule", "member with highest individual CV CCR, then label 0"},
        {"label_rule", "useful (1) iff Likert value > threshold"},
        {"missing_difficulties", options.impute == ImputePolicy::Median ? "median imputation" : "row dropped"},
    };
    return report;
}

}  // namespace dysa
