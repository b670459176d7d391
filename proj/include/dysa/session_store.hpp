#pragma once

#include "dysa/psychometrics.hpp"

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dysa {

struct SessionFilter {
    std::optional<std::string> user_id;
    std::optional<std::string> environment;
    std::optional<std::string> from;  ///< inclusive start_time bound
    std::optional<std::string> to;    ///< inclusive start_time bound
};

/// Append-only store over six tables, one JSON-lines file each:
///   users, environments, languages, silent_reading_results,
///   rosenberg_results, emotional_states.
/// The first line of every file is a schema header. The three reference
/// tables are seeded when the directory is first opened.
class SessionStore {
public:
    static constexpr int kSchemaVersion = 1;
    static const std::vector<std::string>& table_names();

    explicit SessionStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    /// Validates, checks foreign keys, appends. Throws DataError on
    /// validation failure and ReferentialError on a dangling key.
    void add_user(const UserRecord& user);
    void store_session(const SilentReadingSession& session);
    /// Stores the session with its computed total and band.
    void store_session(const RosenbergSession& session);

    std::vector<UserRecord> users() const;
    std::vector<SilentReadingSession> list_silent_reading(const SessionFilter& filter = {}) const;
    std::vector<RosenbergSession> list_rosenberg(const SessionFilter& filter = {}) const;

    bool has_user(const std::string& id) const;
    bool has_environment(const std::string& id) const;
    bool has_language(const std::string& id) const;

private:
    std::filesystem::path table_path(const std::string& table) const;
    void append(const std::string& table, const nlohmann::ordered_json& row);
    void seed_reference_tables();
    void load();

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    std::vector<UserRecord> users_;
    std::vector<std::string> environments_;
    std::vector<std::string> languages_;
    std::vector<SilentReadingSession> silent_;
    std::vector<RosenbergSession> rosenberg_;
};

}  // namespace dysa
