#include "fixtures.hpp"
#include "oracles.hpp"

#include "dysa/binarize.hpp"
#include "dysa/error.hpp"
#include "dysa/learners.hpp"
#include "dysa/rng.hpp"
#include "dysa/synth.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

using namespace dysa;

using oracles::random_labels;
using oracles::random_matrix;
using oracles::separable_fixture;
using oracles::training_ccr;

TEST_CASE("rbf kernel values") {
    std::vector<double> a{0, 0}, b{1, 1};
    CHECK(rbf_kernel(a, b, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(rbf_kernel(a, b, 0.5) == doctest::Approx(0.3679).epsilon(1e-4));
    CHECK(rbf_kernel(a, a, 3.0) == 1.0);
    CHECK(rbf_kernel(a, b, 1e-12) == doctest::Approx(1.0));
    CHECK(rbf_kernel(a, b, 0.7) == rbf_kernel(b, a, 0.7));
}

TEST_CASE("rbf gram matrix is symmetric positive semidefinite") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 2 + rng.below(19);
        auto X = random_matrix(rng, n, 12, trial % 2 ? 6 : 0);
        Eigen::MatrixXd K = gram_matrix(X, {KernelType::Rbf, 0.01 + rng.uniform()});
        CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("knn matches the brute-force oracle on 200 queries") {
    Rng rng(5);
    // Integer coordinates create many equal distances.
    auto X = random_matrix(rng, 50, 3, 4);
    auto y = random_labels(rng, 50);
    for (int k : {1, 5, 11}) {
        NearestNeighbors nn(X, y, k);
        for (int q = 0; q < 200; ++q) {
            std::vector<double> x(3);
            for (auto& v : x) v = static_cast<double>(rng.below(4));
            std::uint8_t expect = oracles::knn(X, y, x, k);
            CHECK((nn.vote_fraction(x) > 0.5 ? 1 : 0) == expect);
        }
    }
}

TEST_CASE("knn through fit agrees with the oracle on binary inputs") {
    Rng rng(6);
    auto X = random_matrix(rng, 50, 12, 2);
    auto y = random_labels(rng, 50);
    auto m = fit(KnnSpec{5}, X, y, 1);
    for (int q = 0; q < 200; ++q) {
        std::vector<double> x(12);
        for (auto& v : x) v = static_cast<double>(rng.below(2));
        CHECK(m.predict(x) == oracles::knn(X, y, x, 5));
    }
}

TEST_CASE("knn k=1 returns the label of a matching training point") {
    FeatureMatrix X(3, 2);
    X << 0, 0, 1, 1, 2, 0;
    Labels y{0, 1, 0};
    auto m = fit(KnnSpec{1}, X, y, 0);
    std::vector<double> q{1, 1};
    CHECK(m.predict(q) == 1);
}

TEST_CASE("knn even split votes 0") {
    FeatureMatrix X(2, 1);
    X << 0, 2;
    Labels y{1, 0};
    NearestNeighbors nn(X, y, 2);
    std::vector<double> q{1};
    CHECK(nn.vote_fraction(q) == 0.5);
    CHECK_THROWS_AS(validate(KnnSpec{2}), ConfigError);
}

TEST_CASE("logistic gradient matches central differences at 20 points") {
    Rng rng(23);
    auto X = random_matrix(rng, 40, 5);
    auto y = random_labels(rng, 40);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        Vector p(6);
        for (int i = 0; i < 6; ++i) p(i) = rng.uniform() * 4 - 2;
        double l2 = trial % 3 == 0 ? 0.0 : rng.uniform() * 2;
        Vector g = logistic_gradient(X, y, p, l2);
        Vector fd(6);
        for (int i = 0; i < 6; ++i) {
            Vector a = p, b = p;
            a(i) += h;
            b(i) -= h;
            fd(i) = (logistic_loss(X, y, a, l2) - logistic_loss(X, y, b, l2)) / (2 * h);
        }
        double rel = (g - fd).norm() / std::max(g.norm(), 1e-12);
        CHECK(rel < 1e-4);
    }
}

TEST_CASE("logistic loss never increases and the fit converges") {
    Rng rng(29);
    auto X = random_matrix(rng, 120, 6);
    Labels y(120);
    for (int i = 0; i < 120; ++i) y[i] = X(i, 0) - 0.5 * X(i, 3) + 0.3 * (rng.uniform() - 0.5) > 0;
    for (double l2 : {0.0, 1.0}) {
        LogisticTrace trace;
        LogisticRegression::fit(X, y, {l2, 1000, 1e-6}, &trace);
        REQUIRE(trace.loss.size() >= 2);
        for (std::size_t i = 1; i < trace.loss.size(); ++i) CHECK(trace.loss[i] <= trace.loss[i - 1]);
        CHECK((trace.converged || trace.iterations == 1000));
        if (trace.converged) CHECK(trace.gradient_norm < 1e-6);
    }
}

TEST_CASE("logistic with zero weights predicts 0") {
    TrainedModel m(LogisticSpec{}, 2, Scaling::identity(2), LogisticRegression(Vector::Zero(2), 0.0));
    std::vector<double> x{3, -1};
    CHECK(m.decision_value(x) == 0.5);
    CHECK(m.predict(x) == 0);
}

TEST_CASE("logistic at the feature means returns logistic(intercept)") {
    Rng rng(31);
    auto X = random_matrix(rng, 80, 4);
    Labels y(80);
    for (int i = 0; i < 80; ++i) y[i] = X(i, 1) + 0.5 * rng.uniform() > 0.2;
    auto m = fit(LogisticSpec{}, X, y, 0);
    Eigen::RowVectorXd mean = X.colwise().mean();
    std::vector<double> x(mean.data(), mean.data() + mean.size());
    double b = std::get<LogisticRegression>(m.state()).intercept();
    CHECK(m.decision_value(x) == doctest::Approx(sigmoid(b)).epsilon(1e-12));
}

TEST_CASE("linear svm separates a separable set and satisfies KKT") {
    Rng rng(37);
    FeatureMatrix X;
    Labels y;
    separable_fixture(rng, X, y);
    const double C = 1.0, tol = 1e-3;
    KernelParams k{KernelType::Linear, 1.0};
    auto sol = solve_svm_dual(X, y, k, C, tol);
    REQUIRE(sol.converged);
    auto r = oracles::kkt(X, y, k, sol, C);
    CHECK(r.box);
    CHECK(r.balance <= tol);
    CHECK(r.worst <= tol);
    auto m = fit(SvmSpec{}, X, y, 0);
    CHECK(training_ccr(m, X, y) == 1.0);
}

TEST_CASE("svm margin support vector has decision value near 1") {
    Rng rng(41);
    FeatureMatrix X;
    Labels y;
    separable_fixture(rng, X, y);
    KernelParams k{KernelType::Linear, 1.0};
    auto sol = solve_svm_dual(X, y, k, 10.0, 1e-3);
    auto svm = SupportVectorMachine::from_solution(X, y, k, sol);
    bool found = false;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (sol.alpha(i) > 1e-8 && sol.alpha(i) < 10.0 - 1e-8) {
            CHECK(std::abs(std::abs(svm.decision(row_span(X, i))) - 1.0) <= 1e-3);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("rbf svm satisfies KKT on noisy data") {
    Rng rng(43);
    auto X = random_matrix(rng, 80, 3);
    auto y = random_labels(rng, 80);
    const double C = 1.0, tol = 1e-3;
    KernelParams k{KernelType::Rbf, 0.5};
    auto sol = solve_svm_dual(X, y, k, C, tol);
    REQUIRE(sol.converged);
    auto r = oracles::kkt(X, y, k, sol, C);
    CHECK(r.box);
    CHECK(r.balance <= tol);
    CHECK(r.worst <= tol);
}

TEST_CASE("random forest with unlimited depth fits consistent labels exactly") {
    Rng rng(47);
    auto X = random_matrix(rng, 200, 12);
    auto y = random_labels(rng, 200);
    auto m = fit(ForestSpec{}, X, y, 7);
    CHECK(training_ccr(m, X, y) == 1.0);

    auto Xi = random_matrix(rng, 300, 12, 6);
    Labels yi(300);
    for (int i = 0; i < 300; ++i) yi[i] = 2 * Xi(i, 0) + Xi(i, 4) + Xi(i, 9) > 7;
    CHECK(training_ccr(fit(ForestSpec{}, Xi, yi, 8), Xi, yi) == 1.0);
}

TEST_CASE("random forest votes are unanimous on a trivially separable set") {
    FeatureMatrix X(6, 1);
    X << 0, 1, 2, 3, 4, 5;
    Labels y{0, 0, 0, 1, 1, 1};
    auto m = fit(ForestSpec{}, X, y, 3);
    for (double v : {0.0, 5.0}) {
        std::vector<double> x{v};
        double vf = m.decision_value(x);
        CHECK((vf == 0.0 || vf == 1.0));
    }
}

TEST_CASE("random forest training ccr is at least held-out ccr on planted data") {
    PlantSpec spec;
    spec.targets = {"T7"};
    spec.missing_rates.clear();
    spec.seed = 3;
    auto out = generate(spec);
    auto view = binarize(out.dataset, 1, false);
    const auto& lab = view.labels("T7");
    std::size_t half = view.size() / 2;
    FeatureMatrix Xa = view.X.topRows(half), Xb = view.X.bottomRows(view.size() - half);
    Labels ya(lab.begin(), lab.begin() + half), yb(lab.begin() + half, lab.end());
    auto m = fit(ForestSpec{}, Xa, ya, 1);
    CHECK(training_ccr(m, Xa, ya) >= training_ccr(m, Xb, yb));
}

TEST_CASE("single-class labels give a degenerate constant model") {
    Rng rng(53);
    auto X = random_matrix(rng, 10, 3);
    Labels ones(10, 1);
    for (const LearnerSpec& s : std::vector<LearnerSpec>{ForestSpec{}, KnnSpec{5}, SvmSpec{}, LogisticSpec{}}) {
        auto m = fit(s, X, ones, 0);
        CHECK(m.degenerate());
        std::vector<double> q{9, 9, 9};
        CHECK(m.predict(q) == 1);
        CHECK_THROWS_AS(m.decision_value(q), Error);
    }
}

TEST_CASE("fit rejects bad input and predict rejects the wrong dimension") {
    FeatureMatrix X(1, 2);
    X << 1, 2;
    CHECK_THROWS_AS(fit(LogisticSpec{}, X, Labels{1}, 0), DataError);
    FeatureMatrix Y(2, 2);
    Y << 1, std::nan(""), 0, 1;
    CHECK_THROWS_AS(fit(LogisticSpec{}, Y, Labels{1, 0}, 0), DataError);
    Y(0, 1) = 0;
    auto m = fit(LogisticSpec{}, Y, Labels{1, 0}, 0);
    std::vector<double> bad{1, 2, 3};
    CHECK_THROWS_AS(m.predict(bad), DataError);
}

TEST_CASE("every family is deterministic and survives serialization") {
    Rng rng(59);
    auto X = random_matrix(rng, 90, 12, 6);
    Labels y(90);
    for (int i = 0; i < 90; ++i) y[i] = X(i, 2) + X(i, 7) + rng.below(3) > 6;
    auto probes = random_matrix(rng, 40, 12, 6);
    std::vector<LearnerSpec> specs{ForestSpec{},     KnnSpec{7}, SvmSpec{}, SvmSpec{KernelType::Rbf},
                                   LogisticSpec{}, SvmSpec{KernelType::Rbf, 2.0, 0.3}};
    for (const auto& s : specs) {
        auto a = fit(s, X, y, 99);
        auto b = fit(s, X, y, 99);
        CHECK(a.fingerprint() == b.fingerprint());
        auto c = TrainedModel::from_json(nlohmann::json::parse(a.to_json().dump()));
        CHECK(c.to_json().dump() == a.to_json().dump());
        for (Eigen::Index i = 0; i < probes.rows(); ++i) {
            CHECK(a.predict(row_span(probes, i)) == b.predict(row_span(probes, i)));
            CHECK(a.decision_value(row_span(probes, i)) == c.decision_value(row_span(probes, i)));
        }
    }
}

TEST_CASE("scaling passes binary columns through and standardizes the rest") {
    FeatureMatrix X(4, 2);
    X << 0, 1, 1, 3, 0, 5, 1, 7;
    auto s = Scaling::fit(X);
    auto Z = s.apply(X);
    CHECK(Z.col(0) == X.col(0));
    CHECK(Z.col(1).mean() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::sqrt(Z.col(1).squaredNorm() / 4.0) == doctest::Approx(1.0));
}

TEST_CASE("learner specs validate and serialize strictly") {
    CHECK_THROWS_AS(validate(ForestSpec{0}), ConfigError);
    CHECK_THROWS_AS(validate(SvmSpec{KernelType::Linear, -1.0}), ConfigError);
    CHECK_THROWS_AS(validate(LogisticSpec{-0.1}), ConfigError);
    CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"family", "KNN"}, {"k", 5}, {"C", 1.0}}), ConfigError);
    for (const LearnerSpec& s : std::vector<LearnerSpec>{ForestSpec{50, 4, 7}, KnnSpec{9}, SvmSpec{KernelType::Rbf, 2.0, 0.1},
                                                         LogisticSpec{0.5, 200, 1e-8}})
        CHECK(spec_from_json(spec_to_json(s)) == s);
    CHECK(display_name(ForestSpec{}) == "RF, 50 estimators");
    CHECK(display_name(KnnSpec{7}) == "KNN K=7");
    CHECK(display_name(SvmSpec{}) == "SVM Linear");
    CHECK(display_name(SvmSpec{KernelType::Rbf}) == "SVM RBF");
    CHECK(display_name(LogisticSpec{}) == "LR");
}
