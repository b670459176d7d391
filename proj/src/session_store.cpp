#include "dysa/session_store.hpp"

#include "dysa/error.hpp"

#include <algorithm>
#include <fstream>

namespace dysa {

namespace {

const std::vector<std::string>& table_fields(const std::string& table) {
    static const std::map<std::string, std::vector<std::string>> fields{
        {"users", {"id", "name", "surname", "age", "gender", "email", "associated_difficulties",
                   "additional_difficulties", "registration_date"}},
        {"environments", {"id", "description"}},
        {"languages", {"id"}},
        {"silent_reading_results", {"user_id", "environment", "language", "start_time", "error_count",
                                    "interaction_times", "voice_recognition_errors"}},
        {"rosenberg_results", {"user_id", "environment", "start_time", "elapsed_time", "answers", "total", "band"}},
        {"emotional_states", {"code", "kind", "description"}},
    };
    return fields.at(table);
}

bool matches(const SessionFilter& f, const std::string& user, const std::string& env, const std::string& start) {
    if (f.user_id && *f.user_id != user) return false;
    if (f.environment && *f.environment != env) return false;
    // Timestamps share one fixed-width UTC format, so text order is time order.
    if (f.from && start < *f.from) return false;
    if (f.to && start > *f.to) return false;
    return true;
}

}  // namespace

const std::vector<std::string>& SessionStore::table_names() {
    static const std::vector<std::string> names{"users", "environments", "languages", "silent_reading_results",
                                                "rosenberg_results", "emotional_states"};
    return names;
}

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    if (!std::filesystem::exists(table_path("environments"))) seed_reference_tables();
    load();
}

std::filesystem::path SessionStore::table_path(const std::string& table) const { return dir_ / (table + ".jsonl"); }

void SessionStore::append(const std::string& table, const nlohmann::ordered_json& row) {
    auto path = table_path(table);
    bool fresh = !std::filesystem::exists(path);
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw Error("session store: cannot append to " + path.string());
    if (fresh) {
        nlohmann::ordered_json header{{"table", table}, {"schema_version", kSchemaVersion}, {"fields", table_fields(table)}};
        out << header.dump() << '\n';
    }
    out << row.dump() << '\n';
    out.flush();
    if (!out) throw Error("session store: write failed for " + path.string());
}

void SessionStore::seed_reference_tables() {
    static const std::vector<std::pair<std::string, std::string>> environments{
        {"noisy_class", "Noisy class"},
        {"natural_landscape", "Natural landscape"},
        {"diaphanous_room", "Diaphanous room"},
        {"infinite_room", "Infinite room"},
    };
    for (const auto& [id, desc] : environments) append("environments", {{"id", id}, {"description", desc}});
    for (const auto& id : language_ids()) append("languages", {{"id", id}});
    for (auto a : kAgreementLevels)
        append("emotional_states", {{"code", to_string(a)}, {"kind", "agreement"}, {"description", to_string(a)}});
    append("emotional_states", {{"code", "High"}, {"kind", "self_esteem"}, {"description", "total 30 to 40"}});
    append("emotional_states", {{"code", "Medium"}, {"kind", "self_esteem"}, {"description", "total 26 to 29"}});
    append("emotional_states", {{"code", "Low"}, {"kind", "self_esteem"}, {"description", "total 25 or lower"}});
    for (const auto& t : {"users", "silent_reading_results", "rosenberg_results"}) {
        if (std::filesystem::exists(table_path(t))) continue;
        std::ofstream out(table_path(t), std::ios::binary);
        nlohmann::ordered_json header{{"table", t}, {"schema_version", kSchemaVersion}, {"fields", table_fields(t)}};
        out << header.dump() << '\n';
    }
}

void SessionStore::load() {
    for (const auto& table : table_names()) {
        std::ifstream in(table_path(table));
        if (!in) throw DataError("session store: missing table " + table_path(table).string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw DataError("session store: " + table + " line " + std::to_string(lineno) + ": " + e.what());
            }
            if (lineno == 1) {
                if (j.value("schema_version", 0) > kSchemaVersion)
                    throw DataError("session store: " + table + " has a newer schema version");
                continue;
            }
            if (table == "users") users_.push_back(user_from_json(j));
            else if (table == "environments") environments_.push_back(j.at("id").get<std::string>());
            else if (table == "languages") languages_.push_back(j.at("id").get<std::string>());
            else if (table == "silent_reading_results") silent_.push_back(silent_reading_from_json(j));
            else if (table == "rosenberg_results") rosenberg_.push_back(rosenberg_from_json(j));
        }
    }
}

bool SessionStore::has_user(const std::string& id) const {
    return std::any_of(users_.begin(), users_.end(), [&](const UserRecord& u) { return u.id == id; });
}
bool SessionStore::has_environment(const std::string& id) const {
    return std::find(environments_.begin(), environments_.end(), id) != environments_.end();
}
bool SessionStore::has_language(const std::string& id) const {
    return std::find(languages_.begin(), languages_.end(), id) != languages_.end();
}

void SessionStore::add_user(const UserRecord& user) {
    auto v = validate_user(user);
    if (!v.ok()) throw DataError("user " + user.id + ": " + v.violations.front().field + " " + v.violations.front().message);
    std::lock_guard lock(mutex_);
    if (has_user(user.id)) throw DataError("user " + user.id + " already exists");
    append("users", to_json(user));
    users_.push_back(user);
}

void SessionStore::store_session(const SilentReadingSession& s) {
    std::lock_guard lock(mutex_);
    if (!has_user(s.user_id)) throw ReferentialError("silent reading session: unknown user '" + s.user_id + "'");
    if (!has_environment(s.environment))
        throw ReferentialError("silent reading session: unknown environment '" + s.environment + "'");
    if (!has_language(s.language)) throw ReferentialError("silent reading session: unknown language '" + s.language + "'");
    auto v = validate_session(s);
    if (!v.ok()) throw DataError("silent reading session: " + v.violations.front().field + " " + v.violations.front().message);
    append("silent_reading_results", to_json(s));
    silent_.push_back(s);
}

void SessionStore::store_session(const RosenbergSession& s) {
    std::lock_guard lock(mutex_);
    if (!has_user(s.user_id)) throw ReferentialError("rosenberg session: unknown user '" + s.user_id + "'");
    if (!has_environment(s.environment))
        throw ReferentialError("rosenberg session: unknown environment '" + s.environment + "'");
    auto v = validate_session(s);
    if (!v.ok()) throw DataError("rosenberg session: " + v.violations.front().field + " " + v.violations.front().message);
    auto row = to_json(s);
    auto score = score_rosenberg(s);
    row["total"] = score.total;
    row["band"] = to_string(score.band);
    append("rosenberg_results", row);
    rosenberg_.push_back(s);
}

std::vector<UserRecord> SessionStore::users() const {
    std::lock_guard lock(mutex_);
    return users_;
}

std::vector<SilentReadingSession> SessionStore::list_silent_reading(const SessionFilter& filter) const {
    std::lock_guard lock(mutex_);
    std::vector<SilentReadingSession> out;
    for (const auto& s : silent_)
        if (matches(filter, s.user_id, s.environment, s.start_time)) out.push_back(s);
    return out;
}

std::vector<RosenbergSession> SessionStore::list_rosenberg(const SessionFilter& filter) const {
    std::lock_guard lock(mutex_);
    std::vector<RosenbergSession> out;
    for (const auto& s : rosenberg_)
        if (matches(filter, s.user_id, s.environment, s.start_time)) out.push_back(s);
    return out;
}

}  // namespace dysa
