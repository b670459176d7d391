#include "dysa/commands.hpp"

#include "dysa/error.hpp"
#include "dysa/io.hpp"
#include "dysa/registry.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

namespace dysa {

namespace {

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json parse_json_file(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<std::string> path_strings(const std::vector<std::filesystem::path>& paths) {
    std::vector<std::string> out;
    for (const auto& p : paths) out.push_back(p.string());
    return out;
}

Dataset load_dataset(const std::filesystem::path& path) {
    if (path.extension() == ".json") return dataset_from_json(nlohmann::json::parse(read_file(path)));
    return load_survey(path).dataset;
}

}  // namespace

void write_run_manifest(const std::filesystem::path& out_dir, const std::string& command,
                        const nlohmann::json& parameters, std::optional<std::uint64_t> seed,
                        const std::vector<std::filesystem::path>& inputs,
                        const std::vector<std::filesystem::path>& outputs,
                        const std::optional<std::filesystem::path>& config_file) {
    nlohmann::json j{{"command", command},
                     {"config_file", config_file ? nlohmann::json(config_file->string()) : nlohmann::json(nullptr)},
                     {"parameters", parameters},
                     {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(nullptr)},
                     {"inputs", path_strings(inputs)},
                     {"outputs", path_strings(outputs)},
                     {"timestamp", utc_now()}};
    write_file_atomic(out_dir / "run_manifest.json", j.dump(2) + "\n");
}

LoadResult cmd_ingest(const IngestOptions& o) {
    std::optional<FeatureCatalog> catalog;
    if (o.catalog) catalog = FeatureCatalog::load(*o.catalog);
    LoadOptions lo;
    if (catalog) lo.catalog = &*catalog;
    lo.max_missing_rate = o.max_missing_rate;
    lo.row_policy = o.strict ? RowPolicy::Fail : RowPolicy::Skip;
    LoadResult result = load_survey(o.survey, lo);

    auto issues = nlohmann::json::array();
    for (const auto& r : result.rejected) issues.push_back({{"row", r.row}, {"column", r.column}, {"message", r.message}});
    nlohmann::json report{{"rejected_rows", issues},
                          {"unknown_columns", result.unknown_columns},
                          {"records", result.dataset.size()},
                          {"dropped_targets", result.dataset.dropped_targets()},
                          {"active_targets", result.dataset.active_targets()}};
    write_file_atomic(o.out / "dataset.json", dataset_to_json(result.dataset).dump() + "\n");
    write_file_atomic(o.out / "ingest_issues.json", report.dump(2) + "\n");
    std::vector<std::filesystem::path> inputs{o.survey};
    if (o.catalog) inputs.push_back(*o.catalog);
    write_run_manifest(o.out, "ingest", {{"max_missing_rate", o.max_missing_rate}, {"strict", o.strict}}, std::nullopt,
                       inputs, {o.out / "dataset.json", o.out / "ingest_issues.json"}, o.config_file);
    return result;
}

SynthManifest cmd_synth(const SynthOptions& o) {
    PlantSpec spec;
    bool seeded = false;
    if (o.plan) {
        auto j = parse_json_file(*o.plan);
        spec = PlantSpec::from_json(j);
        seeded = j.contains("seed");
    }
    if (o.seed) spec.seed = *o.seed;
    if (!o.seed && !seeded) throw ConfigError("synth: a seed is required (--seed or \"seed\" in the plan file)");
    if (o.students) spec.n_students = *o.students;
    if (o.noise) spec.label_noise = *o.noise;
    spec.validate();

    auto out = generate(spec);
    std::filesystem::create_directories(o.out);
    write_survey(out.dataset, o.out / "survey.csv.tmp");
    std::filesystem::rename(o.out / "survey.csv.tmp", o.out / "survey.csv");
    write_file_atomic(o.out / "manifest.json", out.manifest.to_json(out.dataset.catalog()).dump(2) + "\n");
    std::vector<std::filesystem::path> inputs;
    if (o.plan) inputs.push_back(*o.plan);
    write_run_manifest(o.out, "synth", spec.to_json(), spec.seed, inputs, {o.out / "survey.csv", o.out / "manifest.json"},
                       o.config_file);
    return out.manifest;
}

EvaluationReport cmd_evaluate(const EvaluateOptions& o) {
    Dataset dataset = load_dataset(o.dataset);
    Grid grid = o.grid ? Grid::from_json(parse_json_file(*o.grid)) : Grid::standard();
    if (o.threshold) grid.thresholds = {*o.threshold};
    if (o.inputs_binarized) grid.encodings = {*o.inputs_binarized};
    if (o.jobs < 1) throw ConfigError("evaluate: --jobs must be at least 1");

    EvaluationReport report = run_all_targets(dataset, grid, o.seed, {o.jobs, o.impute});
    std::vector<std::filesystem::path> outputs{o.out / "report.json"};
    write_report(report, o.out / "report.json");
    for (auto& p : render_tables(report, dataset.catalog(), o.out)) outputs.push_back(std::move(p));
    for (auto& p : render_chart_data(report, dataset.catalog(), o.out)) outputs.push_back(std::move(p));
    write_file_atomic(o.out / "summary.txt", render_summary(report));
    outputs.push_back(o.out / "summary.txt");
    if (o.write_models) {
        build_registry(dataset, report, o.seed, o.impute).save(o.out / "models.json");
        outputs.push_back(o.out / "models.json");
    }
    std::vector<std::filesystem::path> inputs{o.dataset};
    if (o.grid) inputs.push_back(*o.grid);
    write_run_manifest(o.out, "evaluate",
                       {{"grid", grid.to_json()},
                        {"jobs", o.jobs},
                        {"impute", o.impute == ImputePolicy::Median ? "median" : "drop"}},
                       o.seed, inputs, outputs, o.config_file);
    return report;
}

std::vector<std::filesystem::path> cmd_report(const std::filesystem::path& report_path, const std::filesystem::path& out,
                                              const std::optional<std::filesystem::path>& catalog_path) {
    EvaluationReport report = read_report(report_path);
    FeatureCatalog catalog = catalog_path ? FeatureCatalog::load(*catalog_path) : FeatureCatalog::standard();
    if (report.results.empty()) throw DataError("report: no results in " + report_path.string());
    auto written = render_tables(report, catalog, out);
    for (auto& p : render_chart_data(report, catalog, out)) written.push_back(std::move(p));
    write_file_atomic(out / "summary.txt", render_summary(report));
    written.push_back(out / "summary.txt");
    write_run_manifest(out, "report", nlohmann::json::object(), std::nullopt, {report_path}, written);
    return written;
}

std::vector<std::pair<std::string, std::uint8_t>> cmd_predict(const std::filesystem::path& models,
                                                              std::span<const double> difficulties) {
    ModelRegistry reg = ModelRegistry::load(models);
    std::vector<std::pair<std::string, std::uint8_t>> out;
    for (const auto& e : reg.entries) out.emplace_back(e.target, e.predict(difficulties));
    return out;
}

SelfEsteemScore cmd_rosenberg_score(const std::filesystem::path& answers) {
    std::string text = read_file(answers);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return score_rosenberg(rosenberg_from_json(nlohmann::json::parse(text)));
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(answers.string() + ": " + e.what());
        }
    }
    RosenbergSession s;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto a = parse_agreement(line);
        if (!a) throw DataError(answers.string() + " line " + std::to_string(lineno) + ": unknown agreement level '" + line + "'");
        s.answers.push_back(*a);
    }
    return score_rosenberg(s);
}

namespace {

template <typename F>
void for_each_record(const std::filesystem::path& file, F&& f) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(file.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
        f(lineno, j);
    }
}

std::string record_type(const nlohmann::json& j, std::size_t lineno) {
    auto t = j.value("type", "");
    if (t != "user" && t != "silent_reading" && t != "rosenberg")
        throw DataError("line " + std::to_string(lineno) + ": type must be user, silent_reading or rosenberg");
    return t;
}

}  // namespace

std::vector<SessionCheck> cmd_sessions_validate(const std::filesystem::path& file) {
    std::vector<SessionCheck> out;
    for_each_record(file, [&](std::size_t lineno, const nlohmann::json& j) {
        SessionCheck c{lineno, record_type(j, lineno), {}};
        try {
            if (c.type == "user") c.result = validate_user(user_from_json(j));
            else if (c.type == "silent_reading") c.result = validate_session(silent_reading_from_json(j));
            else c.result = validate_session(rosenberg_from_json(j));
        } catch (const DataError& e) {
            c.result.violations.push_back({"record", e.what()});
        }
        out.push_back(std::move(c));
    });
    return out;
}

std::size_t cmd_sessions_import(const std::filesystem::path& table_dir, const std::filesystem::path& file) {
    SessionStore store(table_dir);
    std::size_t count = 0;
    for_each_record(file, [&](std::size_t lineno, const nlohmann::json& j) {
        auto type = record_type(j, lineno);
        try {
            if (type == "user") store.add_user(user_from_json(j));
            else if (type == "silent_reading") store.store_session(silent_reading_from_json(j));
            else store.store_session(rosenberg_from_json(j));
        } catch (const ReferentialError& e) {
            throw ReferentialError("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
        ++count;
    });
    return count;
}

std::vector<std::string> cmd_sessions_list(const std::filesystem::path& table_dir, const SessionFilter& filter,
                                           const std::string& kind) {
    if (kind != "all" && kind != "silent_reading" && kind != "rosenberg")
        throw ConfigError("sessions list: kind must be all, silent_reading or rosenberg");
    if (!std::filesystem::exists(table_dir / "environments.jsonl"))
        throw DataError("sessions list: no session tables in " + table_dir.string());
    SessionStore store(table_dir);
    std::vector<std::string> out;
    if (kind != "rosenberg")
        for (const auto& s : store.list_silent_reading(filter)) {
            auto j = to_json(s);
            j["type"] = "silent_reading";
            out.push_back(j.dump());
        }
    if (kind != "silent_reading")
        for (const auto& s : store.list_rosenberg(filter)) {
            auto j = to_json(s);
            j["type"] = "rosenberg";
            out.push_back(j.dump());
        }
    return out;
}

}  // namespace dysa
