#include "dysa/report.hpp"

#include "dysa/error.hpp"
#include "dysa/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dysa {

namespace {

std::string score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

std::vector<const TargetResult*> rows_of(const EvaluationReport& report, const FeatureCatalog& catalog,
                                         FeatureKind kind) {
    std::vector<const TargetResult*> rows;
    for (const auto& r : report.results)
        if (!r.error && catalog.kind_of(r.target) == kind) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [&](const TargetResult* a, const TargetResult* b) {
        return catalog.target_position(a->target) < catalog.target_position(b->target);
    });
    return rows;
}

}  // namespace

nlohmann::json result_to_json(const TargetResult& r) {
    nlohmann::json j{{"target", r.target}};
    if (r.error) {
        j["error"] = *r.error;
        return j;
    }
    j["best_model"] = display_name(r.best_config.learner);
    j["family"] = family_name(family_of(r.best_config.learner));
    j["config"] = config_to_json(r.best_config);
    j["threshold"] = r.best_config.threshold;
    j["inputs"] = input_name(r.best_config.inputs_binarized);
    j["consensus"] = r.best_config.use_consensus;
    j["mean_ccr"] = r.mean_ccr;
    j["per_fold_ccr"] = r.per_fold_ccr;
    j["pooled_ccr"] = r.pooled_ccr;
    j["positive_rate"] = r.positive_rate;
    j["baseline_ccr"] = r.baseline_ccr;
    j["fold_positive_rate"] = r.fold_positive_rate;
    j["degenerate_folds"] = r.degenerate_folds;
    j["n_rows"] = r.n_rows;
    auto ev = nlohmann::json::array();
    for (const auto& e : r.evaluated) ev.push_back({{"config", config_to_json(e.config)}, {"mean_ccr", e.mean_ccr}});
    j["evaluated"] = ev;
    return j;
}

TargetResult result_from_json(const nlohmann::json& j) {
    TargetResult r;
    r.target = j.at("target").get<std::string>();
    if (j.contains("error")) {
        r.error = j["error"].get<std::string>();
        return r;
    }
    r.best_config = config_from_json(j.at("config"));
    r.mean_ccr = j.at("mean_ccr").get<double>();
    r.per_fold_ccr = j.at("per_fold_ccr").get<std::vector<double>>();
    r.pooled_ccr = j.at("pooled_ccr").get<double>();
    r.positive_rate = j.at("positive_rate").get<double>();
    r.baseline_ccr = j.at("baseline_ccr").get<double>();
    r.fold_positive_rate = j.at("fold_positive_rate").get<std::vector<double>>();
    r.degenerate_folds = j.at("degenerate_folds").get<std::size_t>();
    r.n_rows = j.at("n_rows").get<std::size_t>();
    for (const auto& e : j.at("evaluated")) r.evaluated.push_back({config_from_json(e.at("config")), e.at("mean_ccr")});
    return r;
}

nlohmann::json EvaluationReport::to_json() const {
    auto rs = nlohmann::json::array();
    for (const auto& r : results) rs.push_back(result_to_json(r));
    return {{"format_version", 1},
            {"metadata", metadata},
            {"summary",
             {{"tools_mean_ccr", tools_mean_ccr},
              {"strategies_mean_ccr", strategies_mean_ccr},
              {"tools_count", tools_count},
              {"strategies_count", strategies_count},
              {"tools_above_90", tools_above_90},
              {"strategies_above_90", strategies_above_90},
              {"overall_mean_ccr", overall_mean_ccr()}}},
            {"results", rs}};
}

EvaluationReport EvaluationReport::from_json(const nlohmann::json& j) {
    try {
        EvaluationReport r;
        r.metadata = j.value("metadata", nlohmann::json::object());
        const auto& s = j.at("summary");
        r.tools_mean_ccr = s.at("tools_mean_ccr").get<double>();
        r.strategies_mean_ccr = s.at("strategies_mean_ccr").get<double>();
        r.tools_count = s.at("tools_count").get<std::size_t>();
        r.strategies_count = s.at("strategies_count").get<std::size_t>();
        r.tools_above_90 = s.at("tools_above_90").get<std::size_t>();
        r.strategies_above_90 = s.at("strategies_above_90").get<std::size_t>();
        for (const auto& t : j.at("results")) r.results.push_back(result_from_json(t));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report: malformed: ") + e.what());
    }
}

std::string render_table(const EvaluationReport& report, const FeatureCatalog& catalog, FeatureKind kind) {
    auto rows = rows_of(report, catalog, kind);
    if (rows.empty()) return {};
    std::string out = "ID | Best Model | Thr | Input | Cons | Score\n";
    for (const auto* r : rows) {
        out += r->target + " | " + display_name(r->best_config.learner) + " | " +
               std::to_string(r->best_config.threshold) + " | " + input_name(r->best_config.inputs_binarized) + " | " +
               (r->best_config.use_consensus ? "Yes" : "No") + " | " + score(r->mean_ccr) + "\n";
    }
    return out;
}

std::string render_chart(const EvaluationReport& report, const FeatureCatalog& catalog, FeatureKind kind) {
    auto rows = rows_of(report, catalog, kind);
    if (rows.empty()) return {};
    std::string out = "target,ccr\n";
    for (const auto* r : rows) out += r->target + "," + score(r->mean_ccr) + "\n";
    return out;
}

std::string render_summary(const EvaluationReport& report) {
    std::string out;
    if (report.tools_count)
        out += "Tools: " + percent(report.tools_mean_ccr) + " mean CCR; more than 90% in " +
               std::to_string(report.tools_above_90) + " of the " + std::to_string(report.tools_count) +
               " considered tools\n";
    if (report.strategies_count)
        out += "Strategies: " + percent(report.strategies_mean_ccr) + " mean CCR; more than 90% in " +
               std::to_string(report.strategies_above_90) + " of the " + std::to_string(report.strategies_count) +
               " considered strategies\n";
    return out;
}

std::vector<std::filesystem::path> render_tables(const EvaluationReport& report, const FeatureCatalog& catalog,
                                                 const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    for (auto [kind, name] : {std::pair{FeatureKind::Tool, "tools_table.txt"},
                              std::pair{FeatureKind::Strategy, "strategies_table.txt"}}) {
        auto text = render_table(report, catalog, kind);
        if (text.empty()) continue;
        write_file_atomic(dir / name, text);
        written.push_back(dir / name);
    }
    return written;
}

std::vector<std::filesystem::path> render_chart_data(const EvaluationReport& report, const FeatureCatalog& catalog,
                                                     const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    for (auto [kind, name] : {std::pair{FeatureKind::Tool, "tools_ccr.csv"},
                              std::pair{FeatureKind::Strategy, "strategies_ccr.csv"}}) {
        auto text = render_chart(report, catalog, kind);
        if (text.empty()) continue;
        write_file_atomic(dir / name, text);
        written.push_back(dir / name);
    }
    return written;
}

void write_report(const EvaluationReport& report, const std::filesystem::path& path) {
    write_file_atomic(path, report.to_json().dump(2) + "\n");
}

EvaluationReport read_report(const std::filesystem::path& path) {
    try {
        return EvaluationReport::from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("report: " + path.string() + ": " + e.what());
    }
}

}  // namespace dysa
