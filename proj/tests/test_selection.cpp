#include "fixtures.hpp"
#include "oracles.hpp"

#include "dysa/binarize.hpp"
#include "dysa/error.hpp"
#include "dysa/selection.hpp"
#include "dysa/synth.hpp"

#include <doctest.h>

#include <numeric>
#include <set>

using namespace dysa;

namespace {

PipelineConfig plain(LearnerSpec s, int thr = 1, bool bin = false) {
    PipelineConfig c;
    c.threshold = thr;
    c.inputs_binarized = bin;
    c.learner = std::move(s);
    return c;
}

SynthOutput planted(std::vector<std::string> targets, double noise, std::uint64_t seed = 42) {
    PlantSpec spec;
    spec.targets = std::move(targets);
    spec.label_noise = noise;
    spec.missing_rates.clear();
    spec.seed = seed;
    return generate(spec);
}

}  // namespace

TEST_CASE("ccr examples") {
    std::vector<std::uint8_t> a{1, 1, 0, 0}, b{1, 0, 0, 1};
    CHECK(ccr(a, a) == 1.0);
    CHECK(ccr(a, b) == 0.5);
    CHECK_THROWS_AS(ccr(a, std::vector<std::uint8_t>{1}), DataError);
    CHECK_THROWS_AS(ccr(std::vector<std::uint8_t>{}, std::vector<std::uint8_t>{}), DataError);
}

TEST_CASE("ccr equals a counting oracle on random pairs") {
    Rng rng(1);
    for (int t = 0; t < 300; ++t) {
        std::size_t n = 1 + rng.below(200);
        std::vector<std::uint8_t> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<std::uint8_t>(rng.below(2));
            b[i] = static_cast<std::uint8_t>(rng.below(2));
        }
        CHECK(ccr(a, b) == static_cast<double>(oracles::count_agreements(a, b)) / static_cast<double>(n));
    }
}

TEST_CASE("folds partition the records with sizes differing by at most one") {
    for (std::size_t n : {10u, 23u, 719u, 100u}) {
        auto plan = make_folds(n, 10, 77);
        std::vector<int> seen(n, 0);
        std::size_t lo = n, hi = 0;
        for (std::size_t f = 0; f < 10; ++f) {
            auto test = plan.test_indices(f);
            auto train = plan.train_indices(f);
            CHECK(test.size() + train.size() == n);
            lo = std::min(lo, test.size());
            hi = std::max(hi, test.size());
            for (auto i : test) ++seen[i];
        }
        CHECK(hi - lo <= 1);
        CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
    auto p = make_folds(719, 10, 5);
    std::multiset<std::size_t> sizes;
    for (std::size_t f = 0; f < 10; ++f) sizes.insert(p.test_indices(f).size());
    CHECK(sizes.count(72) == 9);
    CHECK(sizes.count(71) == 1);
    auto singles = make_folds(10, 10, 5);
    for (std::size_t f = 0; f < 10; ++f) CHECK(singles.test_indices(f).size() == 1);
}

TEST_CASE("folds are deterministic per seed and shuffled") {
    CHECK(make_folds(719, 10, 3).assignment == make_folds(719, 10, 3).assignment);
    CHECK(make_folds(719, 10, 3).assignment != make_folds(719, 10, 4).assignment);
    CHECK_THROWS_AS(make_folds(9, 10, 0), Error);
}

TEST_CASE("consensus vote fixtures") {
    std::vector<double> s3{0.8, 0.7, 0.9};
    CHECK(consensus_vote(std::vector<std::uint8_t>{1, 1, 0}, s3) == 1);
    CHECK(consensus_vote(std::vector<std::uint8_t>{0, 0, 0}, s3) == 0);
    CHECK(consensus_vote(std::vector<std::uint8_t>{1, 1, 1}, s3) == 1);
    std::vector<double> s4{0.8, 0.9, 0.7, 0.6};
    CHECK(consensus_vote(std::vector<std::uint8_t>{1, 0, 1, 0}, s4) == 0);
    CHECK(consensus_vote(std::vector<std::uint8_t>{0, 1, 1, 0}, s4) == 1);
    std::vector<double> tied{0.9, 0.9, 0.5, 0.5};
    CHECK(consensus_vote(std::vector<std::uint8_t>{1, 0, 1, 0}, tied) == 0);
    std::vector<double> tied_agree{0.9, 0.9, 0.5, 0.5};
    CHECK(consensus_vote(std::vector<std::uint8_t>{1, 1, 0, 0}, tied_agree) == 1);
}

TEST_CASE("odd voter counts never depend on scores") {
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 3 + 2 * rng.below(3);
        std::vector<std::uint8_t> v(n);
        std::vector<double> s1(n), s2(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = static_cast<std::uint8_t>(rng.below(2));
            s1[i] = rng.uniform();
            s2[i] = rng.uniform();
        }
        CHECK(consensus_vote(v, s1) == consensus_vote(v, s2));
    }
}

TEST_CASE("consensus of identical members equals the member") {
    auto out = planted({"T3", "S9"}, 0.1, 4);
    auto view = binarize(out.dataset, 1, false);
    std::uint64_t ts = target_seed(42, "S9");
    auto plan = target_folds(view.observed_rows("S9").size(), ts);
    for (const LearnerSpec& s : std::vector<LearnerSpec>{LogisticSpec{}, ForestSpec{}}) {
        auto single = cross_validate(plain(s), view, "S9", plan, ts);
        auto cons = consensus_cv({plain(s), plain(s), plain(s)}, view, "S9", plan, ts);
        CHECK(std::abs(cons.mean_ccr - single.mean_ccr) <= 1e-12);
        CHECK(cons.predictions == single.predictions);
    }
}

TEST_CASE("consensus members must share threshold and encoding") {
    auto out = planted({"T3"}, 0.1);
    auto view = binarize(out.dataset, 1, false);
    auto plan = target_folds(view.size(), 1);
    CHECK_THROWS_AS(consensus_cv({plain(LogisticSpec{}), plain(KnnSpec{5}, 4)}, view, "T3", plan, 1), ConfigError);
}

TEST_CASE("cross validation never reads test-fold rows when fitting") {
    auto out = planted({"T5"}, 0.1, 9);
    auto view = binarize(out.dataset, 1, false);
    std::uint64_t ts = 1234;
    auto plan = target_folds(view.size(), ts);
    CvOptions opt;
    opt.record_fingerprints = true;
    for (const LearnerSpec& s : std::vector<LearnerSpec>{ForestSpec{}, KnnSpec{5}, SvmSpec{}, LogisticSpec{}}) {
        auto base = cross_validate(plain(s), view, "T5", plan, ts, opt);
        REQUIRE(base.fold_fingerprints.size() == 10);
        // Scramble the test rows of fold 0: inputs and labels.
        auto scrambled = view;
        for (auto i : plan.test_indices(0)) {
            scrambled.X.row(static_cast<Eigen::Index>(i)).setConstant(5.0);
            auto& lab = scrambled.y.at("T5")[i];
            lab = static_cast<std::int8_t>(1 - lab);
        }
        auto again = cross_validate(plain(s), scrambled, "T5", plan, ts, opt);
        CHECK(again.fold_fingerprints[0] == base.fold_fingerprints[0]);
        bool others_changed = false;
        for (std::size_t f = 1; f < 10; ++f) others_changed |= again.fold_fingerprints[f] != base.fold_fingerprints[f];
        CHECK(others_changed);
    }
}

TEST_CASE("constant target scores 1.0 for every learner") {
    auto ds = fixtures::uniform_dataset(60, 2);
    auto recs = ds.records();
    for (auto& r : recs) r.answers[ds.column_index("S2")] = 0;
    auto view = binarize(Dataset(ds.catalog(), recs), 1, false);
    for (const LearnerSpec& s : std::vector<LearnerSpec>{ForestSpec{}, KnnSpec{5}, SvmSpec{}, LogisticSpec{}}) {
        auto cv = cross_validate(plain(s), view, "S2", 3);
        CHECK(cv.mean_ccr == 1.0);
        CHECK(cv.degenerate_folds == 10);
    }
}

TEST_CASE("noiseless planted rule is learned almost perfectly by the forest" * doctest::test_suite("planted")) {
    auto out = planted({"S4"}, 0.0, 12);
    auto view = binarize(out.dataset, 1, false);
    auto cv = cross_validate(plain(ForestSpec{}), view, "S4", 5);
    CHECK(cv.mean_ccr == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("planted rule with 10% noise scores near 0.90" * doctest::test_suite("planted")) {
    auto out = planted({"S4"}, 0.10, 12);
    auto view = binarize(out.dataset, 1, false);
    auto cv = cross_validate(plain(LogisticSpec{}), view, "S4", 5);
    CHECK(std::abs(cv.mean_ccr - 0.90) <= 0.03);
}

TEST_CASE("cross validation reports means, pooled score and fold balance") {
    auto out = planted({"T2"}, 0.1, 2);
    auto view = binarize(out.dataset, 4, true);
    auto cv = cross_validate(plain(KnnSpec{7}, 4, true), view, "T2", 6);
    CHECK(cv.fold_ccr.size() == 10);
    CHECK(cv.fold_positive_rate.size() == 10);
    double mean = std::accumulate(cv.fold_ccr.begin(), cv.fold_ccr.end(), 0.0) / 10.0;
    CHECK(std::abs(cv.mean_ccr - mean) <= 1e-12);
    CHECK(cv.pooled_ccr == ccr(cv.truth, cv.predictions));
    CHECK(cv.positive_rate < 0.5);
    CHECK_THROWS_AS(cross_validate(plain(KnnSpec{7}, 1, true), view, "T2", 6), ConfigError);
}

TEST_CASE("grid search returns the argmax and records every config") {
    auto out = planted({"T9"}, 0.07, 21);
    auto grid = Grid::standard().expand();
    auto r = grid_search(out.dataset, "T9", grid, 42);
    REQUIRE_FALSE(r.error);
    CHECK(r.evaluated.size() == grid.size());
    for (const auto& e : r.evaluated) CHECK(r.mean_ccr >= e.mean_ccr);
    CHECK(r.per_fold_ccr.size() == 10);
    double mean = std::accumulate(r.per_fold_ccr.begin(), r.per_fold_ccr.end(), 0.0) / 10.0;
    CHECK(std::abs(r.mean_ccr - mean) <= 1e-12);
    CHECK(r.baseline_ccr == doctest::Approx(std::max(r.positive_rate, 1 - r.positive_rate)));

    // Tied scores resolve to the config that sorts first.
    for (const auto& e : r.evaluated)
        if (e.mean_ccr == r.mean_ccr) CHECK_FALSE(config_less(e.config, r.best_config));
}

TEST_CASE("grid of one config returns that config") {
    auto out = planted({"T9"}, 0.07, 21);
    std::vector<PipelineConfig> grid{plain(KnnSpec{9}, 4, true)};
    auto r = grid_search(out.dataset, "T9", grid, 42);
    CHECK(r.best_config == grid[0]);
}

TEST_CASE("pure three-input rule: winner within 0.02 of the Bayes rate" * doctest::test_suite("planted")) {
    auto out = planted({}, 0.07, 42);
    const PlantedRule* rule = nullptr;
    for (const auto& r : out.manifest.rules)
        if (r.inputs.size() == 3) {
            rule = &r;
            break;
        }
    REQUIRE(rule);
    auto r = grid_search(out.dataset, rule->target, Grid::standard().expand(), 42);
    INFO("target " << rule->target << " ccr " << r.mean_ccr);
    CHECK(std::abs(r.mean_ccr - rule->bayes_rate) <= 0.02);
}

TEST_CASE("consensus of the best family members is not far below the weakest member") {
    auto out = planted({"S14"}, 0.07, 42);
    auto view = binarize(out.dataset, 1, false);
    std::uint64_t ts = target_seed(42, "S14");
    auto plan = target_folds(view.size(), ts);
    std::vector<PipelineConfig> members{plain(ForestSpec{}), plain(KnnSpec{11}), plain(SvmSpec{}), plain(LogisticSpec{})};
    double lowest = 1.0;
    for (const auto& m : members) lowest = std::min(lowest, cross_validate(m, view, "S14", plan, ts).mean_ccr);
    CHECK(consensus_cv(members, view, "S14", plan, ts).mean_ccr >= lowest - 0.02);
}

TEST_CASE("config tie-break order") {
    CHECK(config_less(plain(ForestSpec{}), plain(KnnSpec{5})));
    CHECK(config_less(plain(KnnSpec{5}), plain(KnnSpec{7})));
    CHECK(config_less(plain(SvmSpec{}), plain(LogisticSpec{})));
    CHECK(config_less(plain(LogisticSpec{}, 1), plain(LogisticSpec{}, 4)));
    CHECK(config_less(plain(LogisticSpec{}, 1, false), plain(LogisticSpec{}, 1, true)));
    auto cons = plain(LogisticSpec{});
    cons.use_consensus = true;
    cons.members = {ForestSpec{}, LogisticSpec{}};
    CHECK(config_less(plain(LogisticSpec{}), cons));
}

TEST_CASE("standard grid expands to 32 plain and 4 consensus configs") {
    auto g = Grid::standard().expand();
    CHECK(g.size() == 36);
    CHECK(std::count_if(g.begin(), g.end(), [](const auto& c) { return c.use_consensus; }) == 4);
    CHECK(Grid::from_json(Grid::standard().to_json()).expand() == g);
    for (const auto& c : g) CHECK(config_from_json(config_to_json(c)) == c);
}

TEST_CASE("report with two active targets has two rows and is deterministic") {
    auto ds = fixtures::uniform_dataset(50, 13);
    auto recs = ds.records();
    for (std::size_t i = 0; i < 40; ++i)
        for (const auto& t : ds.catalog().target_ids())
            if (t != "T1" && t != "S1") recs[i].answers[ds.column_index(t)] = std::nullopt;
    auto sparse = drop_sparse_targets(Dataset(ds.catalog(), recs), 0.5);
    REQUIRE(sparse.active_targets().size() == 2);
    Grid g;
    g.thresholds = {1};
    g.encodings = {false};
    g.learners = {KnnSpec{5}};
    g.consensus = false;
    auto a = run_all_targets(sparse, g, 7);
    CHECK(a.results.size() == 2);
    CHECK(a.tools_count == 1);
    CHECK(a.strategies_count == 1);
    RunOptions four;
    four.jobs = 4;
    auto b = run_all_targets(sparse, g, 7, four);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(EvaluationReport::from_json(a.to_json()).to_json().dump() == a.to_json().dump());
}

TEST_CASE("seed derivation is documented and decorrelated") {
    CHECK(target_seed(42, "T1") == derive_seed(42, "T1"));
    CHECK(target_seed(42, "T1") != target_seed(42, "T2"));
    CHECK(target_seed(42, "T1") != target_seed(43, "T1"));
}
