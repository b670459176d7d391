#pragma once

#include <json.hpp>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dysa {

enum class Agreement { StronglyAgree, Agree, Disagree, StronglyDisagree };

std::string to_string(Agreement a);  // "strongly agree", ...
std::optional<Agreement> parse_agreement(std::string_view s);
inline constexpr std::array<Agreement, 4> kAgreementLevels{Agreement::StronglyAgree, Agreement::Agree,
                                                           Agreement::Disagree, Agreement::StronglyDisagree};

/// strongly agree 4, agree 3, disagree 2, strongly disagree 1; reversed
/// items mirror the scale.
int score_item(Agreement response, bool reversed);

inline constexpr std::size_t kRosenbergItems = 10;
/// 1-based positions of the negatively worded items.
inline constexpr std::array<int, 5> kReversedItems{2, 5, 6, 8, 9};
bool is_reversed_item(std::size_t index0);

enum class SelfEsteemBand { High, Medium, Low };
std::string to_string(SelfEsteemBand b);  // "High", "Medium", "Low"

/// High 30-40, Medium 26-29, Low up to 25.
SelfEsteemBand band_for(int total);

struct SelfEsteemScore {
    int total = 0;
    SelfEsteemBand band = SelfEsteemBand::Low;
    bool operator==(const SelfEsteemScore&) const = default;
};

enum class AssociatedDifficulty { Dysorthography, Dyscalculia, Dysgraphia, Other };
std::string to_string(AssociatedDifficulty d);
std::optional<AssociatedDifficulty> parse_associated_difficulty(std::string_view s);

/// The four VR rooms a test can run in.
inline const std::vector<std::string>& environment_ids() {
    static const std::vector<std::string> ids{"noisy_class", "natural_landscape", "diaphanous_room", "infinite_room"};
    return ids;
}
inline const std::vector<std::string>& language_ids() {
    static const std::vector<std::string> ids{"English", "Italian", "Spanish", "French"};
    return ids;
}

struct UserRecord {
    std::string id;
    std::string name;
    std::string surname;
    int age = 0;
    std::string gender;
    std::string email;
    std::set<AssociatedDifficulty> associated_difficulties;
    std::string additional_difficulties;
    std::string registration_date;  ///< YYYY-MM-DD
};

inline constexpr std::size_t kInteractionFields = 9;
inline constexpr int kMaxReadingErrors = 9;

struct SilentReadingSession {
    std::string user_id;
    std::string environment;
    std::string language;
    std::string start_time;  ///< YYYY-MM-DDTHH:MM:SSZ
    int error_count = 0;
    std::vector<double> interaction_times;  ///< seconds
    int voice_recognition_errors = 0;
};

struct RosenbergSession {
    std::string user_id;
    std::string environment;
    std::string start_time;
    double elapsed_time = 0.0;  ///< seconds
    std::vector<Agreement> answers;
};

/// Requires exactly 10 answers (DataError otherwise).
SelfEsteemScore score_rosenberg(const RosenbergSession& session);

struct Violation {
    std::string field;
    std::string message;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool violates(std::string_view field) const;
};

ValidationResult validate_session(const SilentReadingSession& s);
ValidationResult validate_session(const RosenbergSession& s);
ValidationResult validate_user(const UserRecord& u);

bool is_valid_timestamp(std::string_view s);  // YYYY-MM-DDTHH:MM:SSZ
bool is_valid_date(std::string_view s);       // YYYY-MM-DD
bool is_valid_email(std::string_view s);

nlohmann::ordered_json to_json(const UserRecord& u);
nlohmann::ordered_json to_json(const SilentReadingSession& s);
nlohmann::ordered_json to_json(const RosenbergSession& s);
UserRecord user_from_json(const nlohmann::json& j);
SilentReadingSession silent_reading_from_json(const nlohmann::json& j);
RosenbergSession rosenberg_from_json(const nlohmann::json& j);

}  // namespace dysa
