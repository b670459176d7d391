#include "dysa/psychometrics.hpp"

#include "dysa/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

namespace dysa {

std::string to_string(Agreement a) {
    switch (a) {
        case Agreement::StronglyAgree: return "strongly agree";
        case Agreement::Agree: return "agree";
        case Agreement::Disagree: return "disagree";
        case Agreement::StronglyDisagree: return "strongly disagree";
    }
    return "?";
}

std::optional<Agreement> parse_agreement(std::string_view s) {
    std::string t;
    for (char c : s) t += c == '_' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto a : kAgreementLevels)
        if (to_string(a) == t) return a;
    return std::nullopt;
}

int score_item(Agreement response, bool reversed) {
    int v = 4 - static_cast<int>(response);
    return reversed ? 5 - v : v;
}

bool is_reversed_item(std::size_t index0) {
    return std::find(kReversedItems.begin(), kReversedItems.end(), static_cast<int>(index0 + 1)) != kReversedItems.end();
}

std::string to_string(SelfEsteemBand b) {
    switch (b) {
        case SelfEsteemBand::High: return "High";
        case SelfEsteemBand::Medium: return "Medium";
        case SelfEsteemBand::Low: return "Low";
    }
    return "?";
}

SelfEsteemBand band_for(int total) {
    if (total >= 30) return SelfEsteemBand::High;
    if (total >= 26) return SelfEsteemBand::Medium;
    return SelfEsteemBand::Low;
}

std::string to_string(AssociatedDifficulty d) {
    switch (d) {
        case AssociatedDifficulty::Dysorthography: return "dysorthography";
        case AssociatedDifficulty::Dyscalculia: return "dyscalculia";
        case AssociatedDifficulty::Dysgraphia: return "dysgraphia";
        case AssociatedDifficulty::Other: return "other";
    }
    return "?";
}

std::optional<AssociatedDifficulty> parse_associated_difficulty(std::string_view s) {
    for (auto d : {AssociatedDifficulty::Dysorthography, AssociatedDifficulty::Dyscalculia,
                   AssociatedDifficulty::Dysgraphia, AssociatedDifficulty::Other})
        if (to_string(d) == s) return d;
    return std::nullopt;
}

SelfEsteemScore score_rosenberg(const RosenbergSession& session) {
    if (session.answers.size() != kRosenbergItems)
        throw DataError("rosenberg: expected 10 answers, got " + std::to_string(session.answers.size()));
    int total = 0;
    for (std::size_t i = 0; i < session.answers.size(); ++i) total += score_item(session.answers[i], is_reversed_item(i));
    return {total, band_for(total)};
}

bool ValidationResult::violates(std::string_view field) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.field == field; });
}

bool is_valid_date(std::string_view s) {
    static const std::regex re(R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01]))");
    return std::regex_match(s.begin(), s.end(), re);
}

bool is_valid_timestamp(std::string_view s) {
    static const std::regex re(R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])T([01]\d|2[0-3]):[0-5]\d:[0-5]\dZ)");
    return std::regex_match(s.begin(), s.end(), re);
}

bool is_valid_email(std::string_view s) {
    static const std::regex re(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
    return std::regex_match(s.begin(), s.end(), re);
}

namespace {

bool known(const std::vector<std::string>& ids, const std::string& v) {
    return std::find(ids.begin(), ids.end(), v) != ids.end();
}

}  // namespace

ValidationResult validate_session(const SilentReadingSession& s) {
    ValidationResult r;
    auto fail = [&](std::string f, std::string m) { r.violations.push_back({std::move(f), std::move(m)}); };
    if (s.user_id.empty()) fail("user_id", "empty");
    if (!known(environment_ids(), s.environment)) fail("environment", "unknown environment '" + s.environment + "'");
    if (!known(language_ids(), s.language)) fail("language", "unknown language '" + s.language + "'");
    if (!is_valid_timestamp(s.start_time)) fail("start_time", "expected YYYY-MM-DDTHH:MM:SSZ");
    if (s.error_count < 0 || s.error_count > kMaxReadingErrors) fail("error_count", "must be in [0, 9]");
    if (s.interaction_times.size() != kInteractionFields)
        fail("interaction_times", "expected 9 durations, got " + std::to_string(s.interaction_times.size()));
    for (std::size_t i = 0; i < s.interaction_times.size(); ++i)
        if (!(std::isfinite(s.interaction_times[i]) && s.interaction_times[i] > 0.0))
            fail("interaction_times", "duration " + std::to_string(i + 1) + " must be positive");
    if (s.voice_recognition_errors < 0) fail("voice_recognition_errors", "must be non-negative");
    return r;
}

ValidationResult validate_session(const RosenbergSession& s) {
    ValidationResult r;
    auto fail = [&](std::string f, std::string m) { r.violations.push_back({std::move(f), std::move(m)}); };
    if (s.user_id.empty()) fail("user_id", "empty");
    if (!known(environment_ids(), s.environment)) fail("environment", "unknown environment '" + s.environment + "'");
    if (!is_valid_timestamp(s.start_time)) fail("start_time", "expected YYYY-MM-DDTHH:MM:SSZ");
    if (!(std::isfinite(s.elapsed_time) && s.elapsed_time > 0.0)) fail("elapsed_time", "must be positive");
    if (s.answers.size() != kRosenbergItems)
        fail("answers", "expected 10 answers, got " + std::to_string(s.answers.size()));
    return r;
}

ValidationResult validate_user(const UserRecord& u) {
    ValidationResult r;
    auto fail = [&](std::string f, std::string m) { r.violations.push_back({std::move(f), std::move(m)}); };
    if (u.id.empty()) fail("id", "empty");
    if (u.age <= 0) fail("age", "must be positive");
    if (!is_valid_email(u.email)) fail("email", "not a valid address");
    if (!is_valid_date(u.registration_date)) fail("registration_date", "expected YYYY-MM-DD");
    return r;
}

nlohmann::ordered_json to_json(const UserRecord& u) {
    std::vector<std::string> diffs;
    for (auto d : u.associated_difficulties) diffs.push_back(to_string(d));
    return {{"id", u.id},
            {"name", u.name},
            {"surname", u.surname},
            {"age", u.age},
            {"gender", u.gender},
            {"email", u.email},
            {"associated_difficulties", diffs},
            {"additional_difficulties", u.additional_difficulties},
            {"registration_date", u.registration_date}};
}

nlohmann::ordered_json to_json(const SilentReadingSession& s) {
    return {{"user_id", s.user_id},
            {"environment", s.environment},
            {"language", s.language},
            {"start_time", s.start_time},
            {"error_count", s.error_count},
            {"interaction_times", s.interaction_times},
            {"voice_recognition_errors", s.voice_recognition_errors}};
}

nlohmann::ordered_json to_json(const RosenbergSession& s) {
    std::vector<std::string> answers;
    for (auto a : s.answers) answers.push_back(to_string(a));
    return {{"user_id", s.user_id},
            {"environment", s.environment},
            {"start_time", s.start_time},
            {"elapsed_time", s.elapsed_time},
            {"answers", answers}};
}

UserRecord user_from_json(const nlohmann::json& j) {
    try {
        UserRecord u;
        u.id = j.at("id").get<std::string>();
        u.name = j.value("name", "");
        u.surname = j.value("surname", "");
        u.age = j.at("age").get<int>();
        u.gender = j.value("gender", "");
        u.email = j.at("email").get<std::string>();
        for (const auto& d : j.value("associated_difficulties", std::vector<std::string>{})) {
            auto p = parse_associated_difficulty(d);
            if (!p) throw DataError("user: unknown associated difficulty '" + d + "'");
            u.associated_difficulties.insert(*p);
        }
        u.additional_difficulties = j.value("additional_difficulties", "");
        u.registration_date = j.at("registration_date").get<std::string>();
        return u;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("user: ") + e.what());
    }
}

SilentReadingSession silent_reading_from_json(const nlohmann::json& j) {
    try {
        SilentReadingSession s;
        s.user_id = j.at("user_id").get<std::string>();
        s.environment = j.at("environment").get<std::string>();
        s.language = j.at("language").get<std::string>();
        s.start_time = j.at("start_time").get<std::string>();
        s.error_count = j.at("error_count").get<int>();
        s.interaction_times = j.at("interaction_times").get<std::vector<double>>();
        s.voice_recognition_errors = j.value("voice_recognition_errors", 0);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("silent reading session: ") + e.what());
    }
}

RosenbergSession rosenberg_from_json(const nlohmann::json& j) {
    try {
        RosenbergSession s;
        s.user_id = j.at("user_id").get<std::string>();
        s.environment = j.at("environment").get<std::string>();
        s.start_time = j.at("start_time").get<std::string>();
        s.elapsed_time = j.at("elapsed_time").get<double>();
        for (const auto& a : j.at("answers").get<std::vector<std::string>>()) {
            auto p = parse_agreement(a);
            if (!p) throw DataError("rosenberg session: unknown agreement level '" + a + "'");
            s.answers.push_back(*p);
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("rosenberg session: ") + e.what());
    }
}

}  // namespace dysa
