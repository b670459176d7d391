#pragma once

#include "dysa/learners.hpp"
#include "dysa/rng.hpp"
#include "dysa/selection.hpp"
#include "dysa/survey.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace fixtures {

inline std::filesystem::path source_dir() { return DYSA_TEST_SOURCE_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("dysa_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Dataset with every answer drawn uniformly from 0..5 and no missing cells.
inline dysa::Dataset uniform_dataset(std::size_t n, std::uint64_t seed) {
    const auto& cat = dysa::FeatureCatalog::standard();
    dysa::Rng rng(seed);
    std::vector<dysa::SurveyRecord> recs;
    std::size_t width = cat.difficulties().size() + cat.tools().size() + cat.strategies().size();
    for (std::size_t i = 0; i < n; ++i) {
        dysa::SurveyRecord r{"s" + std::to_string(i), {}};
        for (std::size_t c = 0; c < width; ++c) r.answers.push_back(static_cast<std::uint8_t>(rng.below(6)));
        recs.push_back(std::move(r));
    }
    return dysa::Dataset(cat, std::move(recs));
}

struct ReferenceRow {
    const char* id;
    dysa::LearnerSpec learner;
    int threshold;
    bool binary;
    bool consensus;
    double score;
};

inline dysa::LearnerSpec rf() { return dysa::ForestSpec{}; }
inline dysa::LearnerSpec knn(int k) { return dysa::KnnSpec{k}; }
inline dysa::LearnerSpec svm_linear() { return dysa::SvmSpec{}; }
inline dysa::LearnerSpec svm_rbf() { return dysa::SvmSpec{dysa::KernelType::Rbf}; }
inline dysa::LearnerSpec lr() { return dysa::LogisticSpec{}; }

/// Reference best configuration per target, 719-student cohort.
inline std::vector<ReferenceRow> reference_rows() {
    return {
        {"T1", svm_rbf(), 4, false, true, 0.7443},     {"T2", rf(), 4, false, false, 0.9433},
        {"T3", svm_linear(), 1, true, false, 0.9111},  {"T5", svm_rbf(), 1, true, true, 0.8852},
        {"T6", knn(7), 1, true, false, 0.9538},        {"T7", svm_linear(), 1, true, false, 0.9761},
        {"T8", knn(11), 1, false, false, 0.9325},      {"T9", svm_rbf(), 1, true, false, 0.9298},
        {"T10", svm_rbf(), 1, true, false, 0.9436},    {"T11", svm_rbf(), 4, true, true, 0.7246},
        {"T12", svm_rbf(), 4, true, true, 0.7410},     {"T13", knn(9), 1, true, false, 0.9449},
        {"T14", svm_rbf(), 1, true, true, 0.9633},     {"T15", svm_linear(), 1, true, false, 0.9354},
        {"T16", rf(), 1, false, false, 0.9279},        {"T17", svm_linear(), 1, true, false, 0.9367},
        {"S1", lr(), 4, false, false, 0.7764},         {"S2", rf(), 1, false, false, 0.9689},
        {"S3", svm_linear(), 1, true, false, 0.979},   {"S4", knn(5), 1, false, false, 0.9666},
        {"S5", rf(), 1, false, false, 0.9836},         {"S6", rf(), 1, false, false, 0.9738},
        {"S7", lr(), 1, false, false, 0.9403},         {"S8", svm_rbf(), 1, true, false, 0.8902},
        {"S9", lr(), 1, false, false, 0.8787},         {"S10", rf(), 1, false, true, 0.9016},
        {"S11", rf(), 1, false, false, 0.9443},        {"S12", lr(), 1, false, false, 0.9636},
        {"S13", svm_linear(), 1, true, false, 0.9846}, {"S14", svm_linear(), 1, true, false, 0.9898},
        {"S15", svm_linear(), 1, true, false, 0.9603}, {"S16", rf(), 1, false, false, 0.9725},
        {"S17", rf(), 1, false, false, 0.9551},        {"S18", rf(), 1, false, false, 0.9698},
        {"S19", rf(), 1, false, true, 0.8164},         {"S20", rf(), 1, false, false, 0.8554},
        {"S21", rf(), 1, false, false, 0.8626},        {"S22", rf(), 1, false, false, 0.9390},
    };
}

/// Report built from the reference rows. Rows are inserted in reverse so
/// the renderer has to restore catalog order.
inline dysa::EvaluationReport reference_report() {
    dysa::EvaluationReport rep;
    auto rows = reference_rows();
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        dysa::TargetResult r;
        r.target = it->id;
        r.best_config.threshold = it->threshold;
        r.best_config.inputs_binarized = it->binary;
        r.best_config.learner = it->learner;
        r.best_config.use_consensus = it->consensus;
        if (it->consensus) r.best_config.members = {it->learner, lr()};
        r.mean_ccr = it->score;
        r.per_fold_ccr.assign(10, it->score);
        r.pooled_ccr = it->score;
        r.n_rows = 719;
        rep.results.push_back(r);
    }
    dysa::summarize(rep, dysa::FeatureCatalog::standard());
    return rep;
}

}  // namespace fixtures
