#include "dysa/survey.hpp"

#include "dysa/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace dysa {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(cell);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

Dataset::Dataset(FeatureCatalog catalog, std::vector<SurveyRecord> records,
                 std::map<std::string, double> dropped_targets)
    : catalog_(std::move(catalog)), records_(std::move(records)), dropped_(std::move(dropped_targets)) {
    if (records_.empty()) throw DataError("dataset: no records");
    for (const auto* group : {&catalog_.difficulties(), &catalog_.tools(), &catalog_.strategies()})
        for (const auto& e : *group) columns_.push_back(e.id);

    std::vector<std::size_t> missing(columns_.size(), 0);
    std::set<std::string> ids;
    for (std::size_t r = 0; r < records_.size(); ++r) {
        const auto& rec = records_[r];
        if (rec.answers.size() != columns_.size())
            throw DataError("dataset: record " + std::to_string(r) + " has " +
                            std::to_string(rec.answers.size()) + " answers, expected " +
                            std::to_string(columns_.size()));
        if (!ids.insert(rec.student_id).second)
            throw DataError("dataset: duplicate student_id '" + rec.student_id + "'");
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            if (!rec.answers[c]) {
                ++missing[c];
            } else if (*rec.answers[c] > kLikertMax) {
                throw DataError("dataset: record " + std::to_string(r) + " column " + columns_[c] +
                                " out of range");
            }
        }
    }
    for (auto n : missing) missing_rates_.push_back(static_cast<double>(n) / static_cast<double>(records_.size()));
    for (const auto& [id, rate] : dropped_) {
        auto kind = catalog_.kind_of(id);
        if (!kind || *kind == FeatureKind::Difficulty)
            throw DataError("dataset: cannot drop non-target column " + id);
    }
}

std::size_t Dataset::column_index(std::string_view id) const {
    auto it = std::find(columns_.begin(), columns_.end(), id);
    if (it == columns_.end()) throw DataError("dataset: unknown column " + std::string(id));
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<std::string> Dataset::active_targets() const {
    std::vector<std::string> out;
    for (auto& id : catalog_.target_ids())
        if (!dropped_.contains(id)) out.push_back(std::move(id));
    return out;
}

bool Dataset::is_active_target(std::string_view id) const {
    auto kind = catalog_.kind_of(id);
    return kind && *kind != FeatureKind::Difficulty && !dropped_.contains(std::string(id));
}

LoadResult load_survey(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("survey: cannot open " + path.string());
    const FeatureCatalog& catalog = *options.catalog;

    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) throw DataError("survey: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split(line, options.delimiter);

    std::vector<std::string> columns;
    for (const auto* group : {&catalog.difficulties(), &catalog.tools(), &catalog.strategies()})
        for (const auto& e : *group) columns.push_back(e.id);

    // Header position -> dataset column (or -1 unknown, -2 student_id).
    std::vector<int> mapping;
    std::vector<std::string> unknown;
    std::set<std::string> seen;
    for (auto& raw : header) {
        std::string name = trim(raw);
        if (!seen.insert(name).second) throw DataError("survey: duplicate header column '" + name + "'");
        if (name == "student_id") {
            mapping.push_back(-2);
            continue;
        }
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) {
            mapping.push_back(-1);
            unknown.push_back(name);
        } else {
            mapping.push_back(static_cast<int>(it - columns.begin()));
        }
    }
    for (const auto& e : catalog.difficulties())
        if (!seen.contains(e.id)) throw DataError("survey: header lacks difficulty column " + e.id);

    std::vector<SurveyRecord> records;
    std::vector<RowIssue> rejected;
    std::set<std::string> student_ids;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++row;
        auto cells = split(line, options.delimiter);
        SurveyRecord rec{"row" + std::to_string(row), std::vector<Likert>(columns.size())};
        std::optional<RowIssue> issue;
        if (cells.size() != header.size()) {
            issue = RowIssue{row, "", "expected " + std::to_string(header.size()) + " cells, got " +
                                          std::to_string(cells.size())};
        }
        for (std::size_t i = 0; !issue && i < cells.size(); ++i) {
            std::string cell = trim(cells[i]);
            if (mapping[i] == -2) {
                if (cell.empty()) issue = RowIssue{row, "student_id", "empty student_id"};
                rec.student_id = cell;
                continue;
            }
            if (mapping[i] == -1 || cell.empty()) continue;
            int v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                issue = RowIssue{row, trim(header[i]), "non-integer value '" + cell + "'"};
            } else if (v < kLikertMin || v > kLikertMax) {
                issue = RowIssue{row, trim(header[i]), "value " + cell + " outside Likert range 0-5"};
            } else {
                rec.answers[static_cast<std::size_t>(mapping[i])] = static_cast<std::uint8_t>(v);
            }
        }
        if (!issue && student_ids.contains(rec.student_id))
            issue = RowIssue{row, "student_id", "duplicate student_id '" + rec.student_id + "'"};
        if (issue) {
            if (options.row_policy == RowPolicy::Fail)
                throw DataError("survey: row " + std::to_string(issue->row) +
                                (issue->column.empty() ? "" : " column " + issue->column) + ": " + issue->message);
            rejected.push_back(std::move(*issue));
            continue;
        }
        student_ids.insert(rec.student_id);
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw DataError("survey: no valid records in " + path.string());

    Dataset dataset(catalog, std::move(records));
    return {drop_sparse_targets(dataset, options.max_missing_rate), std::move(rejected), std::move(unknown)};
}

void write_survey(const Dataset& dataset, const std::filesystem::path& path, char delimiter) {
    std::ofstream out(path);
    if (!out) throw DataError("survey: cannot write " + path.string());
    out << "student_id";
    for (const auto& id : dataset.columns()) out << delimiter << id;
    out << '\n';
    for (const auto& rec : dataset.records()) {
        out << rec.student_id;
        for (const auto& a : rec.answers) {
            out << delimiter;
            if (a) out << static_cast<int>(*a);
        }
        out << '\n';
    }
}

Dataset drop_sparse_targets(const Dataset& dataset, double max_missing_rate) {
    if (!(max_missing_rate > 0.0 && max_missing_rate < 1.0))
        throw ConfigError("drop_sparse_targets: max_missing_rate must be in (0, 1)");
    auto dropped = dataset.dropped_targets();
    std::size_t active = 0;
    for (const auto& id : dataset.catalog().target_ids()) {
        double rate = dataset.missing_rate(id);
        if (!dropped.contains(id) && rate > max_missing_rate) dropped.emplace(id, rate);
        if (!dropped.contains(id)) ++active;
    }
    if (active == 0) throw ConfigError("drop_sparse_targets: every target exceeds the missing-rate limit");
    return Dataset(dataset.catalog(), dataset.records(), std::move(dropped));
}

}  // namespace dysa

namespace dysa {

nlohmann::json dataset_to_json(const Dataset& dataset) {
    auto catalog = nlohmann::json::array();
    for (const auto* group : {&dataset.catalog().difficulties(), &dataset.catalog().tools(), &dataset.catalog().strategies()})
        for (const auto& e : *group) catalog.push_back({{"id", e.id}, {"label", e.label}});
    auto records = nlohmann::json::array();
    for (const auto& rec : dataset.records()) {
        auto answers = nlohmann::json::array();
        for (const auto& a : rec.answers) answers.push_back(a ? nlohmann::json(static_cast<int>(*a)) : nlohmann::json(nullptr));
        records.push_back({{"student_id", rec.student_id}, {"answers", answers}});
    }
    nlohmann::json missing = nlohmann::json::object();
    for (const auto& id : dataset.columns()) missing[id] = dataset.missing_rate(id);
    return {{"format_version", 1},
            {"catalog", catalog},
            {"columns", dataset.columns()},
            {"records", records},
            {"dropped_targets", dataset.dropped_targets()},
            {"missing_rates", missing}};
}

Dataset dataset_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() > 1) throw DataError("dataset archive: unsupported format_version");
        std::vector<CatalogEntry> entries;
        for (const auto& e : j.at("catalog")) entries.push_back({e.at("id").get<std::string>(), e.at("label").get<std::string>()});
        FeatureCatalog catalog(std::move(entries));
        auto columns = j.at("columns").get<std::vector<std::string>>();
        std::vector<SurveyRecord> records;
        for (const auto& r : j.at("records")) {
            SurveyRecord rec{r.at("student_id").get<std::string>(), {}};
            for (const auto& a : r.at("answers")) {
                if (a.is_null()) {
                    rec.answers.emplace_back();
                    continue;
                }
                int v = a.get<int>();
                if (v < kLikertMin || v > kLikertMax) throw DataError("dataset archive: value out of range for " + rec.student_id);
                rec.answers.emplace_back(static_cast<std::uint8_t>(v));
            }
            records.push_back(std::move(rec));
        }
        Dataset d(std::move(catalog), std::move(records), j.at("dropped_targets").get<std::map<std::string, double>>());
        if (d.columns() != columns) throw DataError("dataset archive: column order does not match its catalog");
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("dataset archive: ") + e.what());
    }
}

}  // namespace dysa
