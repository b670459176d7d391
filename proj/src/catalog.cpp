#include "dysa/catalog.hpp"

#include "dysa/error.hpp"

#include <charconv>
#include <fstream>
#include <set>

namespace dysa {

namespace {

const std::vector<CatalogEntry>& standard_entries() {
    static const std::vector<CatalogEntry> entries = {
        {"P1", "Reading"},
        {"P2", "Writing"},
        {"P3", "Understanding difficult words"},
        {"P4", "Understanding the lessons"},
        {"P5", "Concentration"},
        {"P6", "Paying attention during presential lessons"},
        {"P7", "Paying attention during online lessons"},
        {"P8", "Memorising recently studied concepts"},
        {"P9", "Remembering concepts studied during the exam"},
        {"P10", "Study time management"},
        {"P11", "Taking notes"},
        {"P12", "Limited time available to prepare a task/question/exam"},
        {"T1", "Human voice audio book"},
        {"T2", "Robotic voice audio book"},
        {"T3", "Different colour words"},
        {"T4", "Using the EasyReading font"},
        {"T5", "Using a smart pen or tablet to take notes and record voice"},
        {"T6", "Clearer layout of the study material"},
        {"T7", "Having the key words of the text highlighted"},
        {"T8", "Prepared concept maps"},
        {"T9", "Prepared schemes"},
        {"T10", "Prepared summaries"},
        {"T11", "E-Books"},
        {"T12", "Digital tutor"},
        {"T13", "Images to help understand the meaning of difficult words"},
        {"T14", "Images that help to memorise a concept"},
        {"T15", "Audio recording of lessons"},
        {"T16", "Video lessons"},
        {"T17", "Supplementing study material with internet research"},
        {"S1", "A person reading for him/her"},
        {"S2", "A map made by himself/herself"},
        {"S3", "A scheme made by himself/herself"},
        {"S4", "A summary made by himself/herself"},
        {"S5", "Repeat the studied material"},
        {"S6", "Marking keywords"},
        {"S7", "Underlining with different colours"},
        {"S8", "Having a study group"},
        {"S9", "Having a tutor"},
        {"S10", "Dyslexic student group to exchange resources"},
        {"S11", "Presential lessons"},
        {"S12", "Online lessons available"},
        {"S13", "Taking breaks during lessons"},
        {"S14", "Lesson slides available"},
        {"S15", "Recording the lesson"},
        {"S16", "Taking notes"},
        {"S17", "Having the lesson plan in advance"},
        {"S18", "Dividing an examination/task/question into several parts"},
        {"S19", "Only written tests"},
        {"S20", "Only oral tests"},
        {"S21", "Conducting the exams in the presence of the professor alone"},
        {"S22", "Having an online database with notes made by other students"},
    };
    return entries;
}

// Parses "P7" -> ('P', 7).
std::optional<std::pair<char, int>> split_id(std::string_view id) {
    if (id.size() < 2) return std::nullopt;
    int n = 0;
    auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
    if (ec != std::errc{} || ptr != id.data() + id.size() || n <= 0) return std::nullopt;
    return std::pair{id[0], n};
}

const CatalogEntry* find(const std::vector<CatalogEntry>& v, std::string_view id) {
    for (const auto& e : v)
        if (e.id == id) return &e;
    return nullptr;
}

}  // namespace

bool operator==(const CatalogEntry& a, const CatalogEntry& b) {
    return a.id == b.id && a.label == b.label;
}

const FeatureCatalog& FeatureCatalog::standard() {
    static const FeatureCatalog catalog(standard_entries());
    return catalog;
}

FeatureCatalog::FeatureCatalog(std::vector<CatalogEntry> entries) {
    std::set<std::string> seen;
    for (auto& e : entries) {
        if (!seen.insert(e.id).second) throw ConfigError("catalog: duplicate identifier " + e.id);
        auto parts = split_id(e.id);
        if (!parts) throw ConfigError("catalog: malformed identifier '" + e.id + "'");
        switch (parts->first) {
            case 'P': difficulties_.push_back(std::move(e)); break;
            case 'T': tools_.push_back(std::move(e)); break;
            case 'S': strategies_.push_back(std::move(e)); break;
            default: throw ConfigError("catalog: identifier '" + e.id + "' is not P/T/S");
        }
    }
    auto check = [](std::vector<CatalogEntry>& v, char prefix, std::size_t count) {
        std::sort(v.begin(), v.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
            return split_id(a.id)->second < split_id(b.id)->second;
        });
        if (v.size() != count)
            throw ConfigError(std::string("catalog: expected ") + std::to_string(count) + " " + prefix +
                              " identifiers, got " + std::to_string(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i)
            if (split_id(v[i].id)->second != static_cast<int>(i + 1))
                throw ConfigError(std::string("catalog: missing identifier ") + prefix + std::to_string(i + 1));
    };
    check(difficulties_, 'P', kDifficulties);
    check(tools_, 'T', kTools);
    check(strategies_, 'S', kStrategies);
}

FeatureCatalog FeatureCatalog::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("catalog: cannot open " + path.string());
    std::vector<CatalogEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw ConfigError("catalog: expected ID<TAB>label in '" + line + "'");
        entries.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return FeatureCatalog(std::move(entries));
}

void FeatureCatalog::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("catalog: cannot write " + path.string());
    out << "# ID\tlabel\n";
    for (const auto* group : {&difficulties_, &tools_, &strategies_})
        for (const auto& e : *group) out << e.id << '\t' << e.label << '\n';
}

std::vector<std::string> FeatureCatalog::target_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : tools_) ids.push_back(e.id);
    for (const auto& e : strategies_) ids.push_back(e.id);
    return ids;
}

std::vector<std::string> FeatureCatalog::difficulty_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : difficulties_) ids.push_back(e.id);
    return ids;
}

std::optional<FeatureKind> FeatureCatalog::kind_of(std::string_view id) const {
    if (find(difficulties_, id)) return FeatureKind::Difficulty;
    if (find(tools_, id)) return FeatureKind::Tool;
    if (find(strategies_, id)) return FeatureKind::Strategy;
    return std::nullopt;
}

const std::string& FeatureCatalog::label(std::string_view id) const {
    for (const auto* group : {&difficulties_, &tools_, &strategies_})
        if (const auto* e = find(*group, id)) return e->label;
    throw ConfigError("catalog: unknown identifier " + std::string(id));
}

std::size_t FeatureCatalog::target_position(std::string_view id) const {
    for (std::size_t i = 0; i < tools_.size(); ++i)
        if (tools_[i].id == id) return i;
    for (std::size_t i = 0; i < strategies_.size(); ++i)
        if (strategies_[i].id == id) return tools_.size() + i;
    throw ConfigError("catalog: unknown target " + std::string(id));
}

}  // namespace dysa
