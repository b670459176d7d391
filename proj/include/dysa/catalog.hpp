#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dysa {

enum class FeatureKind { Difficulty, Tool, Strategy };

struct CatalogEntry {
    std::string id;
    std::string label;
};

/// Ordered identifiers of the 12 difficulties (inputs), 17 support tools and
/// 22 learning strategies (targets), with their human-readable labels.
class FeatureCatalog {
public:
    static constexpr std::size_t kDifficulties = 12;
    static constexpr std::size_t kTools = 17;
    static constexpr std::size_t kStrategies = 22;

    /// The survey's item table.
    static const FeatureCatalog& standard();

    /// Reads "ID<TAB>label" lines; '#' starts a comment. Identifiers must be
    /// P1..P12, T1..T17, S1..S22, each exactly once.
    static FeatureCatalog load(const std::filesystem::path& path);

    explicit FeatureCatalog(std::vector<CatalogEntry> entries);

    const std::vector<CatalogEntry>& difficulties() const { return difficulties_; }
    const std::vector<CatalogEntry>& tools() const { return tools_; }
    const std::vector<CatalogEntry>& strategies() const { return strategies_; }

    /// Tools followed by strategies, in catalog order.
    std::vector<std::string> target_ids() const;
    std::vector<std::string> difficulty_ids() const;

    std::optional<FeatureKind> kind_of(std::string_view id) const;
    bool contains(std::string_view id) const { return kind_of(id).has_value(); }
    const std::string& label(std::string_view id) const;

    /// Position of a target in catalog order (tools first); used for sorting.
    std::size_t target_position(std::string_view id) const;

    void write(const std::filesystem::path& path) const;

    bool operator==(const FeatureCatalog&) const = default;

private:
    std::vector<CatalogEntry> difficulties_;
    std::vector<CatalogEntry> tools_;
    std::vector<CatalogEntry> strategies_;
};

bool operator==(const CatalogEntry& a, const CatalogEntry& b);

}  // namespace dysa
