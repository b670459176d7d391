#include "dysa/binarize.hpp"

#include "dysa/error.hpp"

#include <algorithm>

namespace dysa {

const std::vector<std::int8_t>& BinaryView::labels(const std::string& target) const {
    auto it = y.find(target);
    if (it == y.end()) throw DataError("target " + target + " is not active in this view");
    return it->second;
}

std::vector<std::size_t> BinaryView::observed_rows(const std::string& target) const {
    const auto& lab = labels(target);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < lab.size(); ++i)
        if (lab[i] != kMissingLabel) rows.push_back(i);
    return rows;
}

BinaryView binarize(const Dataset& dataset, int threshold, bool inputs_binarized, ImputePolicy impute) {
    if (threshold < kLikertMin || threshold > kLikertMax)
        throw ConfigError("binarize: threshold must be in [0, 5], got " + std::to_string(threshold));

    const auto difficulties = dataset.catalog().difficulty_ids();
    const std::size_t d = difficulties.size();
    std::vector<std::size_t> cols;
    for (const auto& id : difficulties) cols.push_back(dataset.column_index(id));

    std::vector<double> medians(d, 0.0);
    if (impute == ImputePolicy::Median) {
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<int> present;
            for (const auto& rec : dataset.records())
                if (auto v = rec.answers[cols[j]]) present.push_back(*v);
            if (present.empty()) throw DataError("binarize: difficulty " + difficulties[j] + " has no answers");
            std::sort(present.begin(), present.end());
            std::size_t m = present.size();
            medians[j] = m % 2 ? present[m / 2] : 0.5 * (present[m / 2 - 1] + present[m / 2]);
        }
    }

    BinaryView view;
    view.threshold = threshold;
    view.inputs_binarized = inputs_binarized;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const auto& rec = dataset.records()[r];
        bool complete = std::all_of(cols.begin(), cols.end(), [&](std::size_t c) { return rec.answers[c].has_value(); });
        if (complete || impute == ImputePolicy::Median) view.source_rows.push_back(r);
    }
    if (view.source_rows.empty()) throw DataError("binarize: no rows with complete difficulty answers");

    view.X.resize(static_cast<Eigen::Index>(view.source_rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < view.source_rows.size(); ++i) {
        const auto& rec = dataset.records()[view.source_rows[i]];
        for (std::size_t j = 0; j < d; ++j) {
            const auto& a = rec.answers[cols[j]];
            double v = a ? static_cast<double>(*a) : medians[j];
            if (inputs_binarized) v = v > threshold ? 1.0 : 0.0;
            view.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }

    view.targets = dataset.active_targets();
    for (const auto& target : view.targets) {
        std::size_t c = dataset.column_index(target);
        std::vector<std::int8_t> lab;
        lab.reserve(view.source_rows.size());
        for (std::size_t r : view.source_rows) {
            const auto& a = dataset.records()[r].answers[c];
            lab.push_back(a ? static_cast<std::int8_t>(above_threshold(*a, threshold)) : kMissingLabel);
        }
        view.y.emplace(target, std::move(lab));
    }
    return view;
}

double class_balance(const BinaryView& view, const std::string& target) {
    const auto& lab = view.labels(target);
    std::size_t n = 0, pos = 0;
    for (auto v : lab) {
        if (v == kMissingLabel) continue;
        ++n;
        pos += static_cast<std::size_t>(v);
    }
    if (n == 0) throw DataError("class_balance: target " + target + " has no answered rows");
    return static_cast<double>(pos) / static_cast<double>(n);
}

}  // namespace dysa
