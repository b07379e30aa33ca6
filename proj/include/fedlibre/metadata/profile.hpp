#pragma once

#include "fedlibre/metadata/lom.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre::metadata {

enum class Profile { Lom, LomFr, SupLomFr };

std::string_view to_string(Profile p) noexcept;
/// Accepts "LOM", "LOMFR", "SUPLOMFR" in any case. Throws Error(UnknownProfile).
Profile parse_profile(std::string_view token);

/// Obligation table for one profile. Paths are leaf paths of the
/// LOM-to-triples predicate table (e.g. "general.title").
struct ProfileTable {
    Profile profile = Profile::Lom;
    std::vector<std::string> mandatory;
    std::vector<std::string> recommended;
};

struct ProfileReport {
    Profile profile = Profile::Lom;
    std::vector<std::string> missing_mandatory;
    std::vector<std::string> present_recommended;
    bool conformant = false;
};

/// Parses a table document: {"profile": "LOMFR", "mandatory": [...], "recommended": [...]}.
/// Unknown paths are rejected with Error(Config).
ProfileTable parse_profile_table(std::string_view json_text);

/// Loads profiles/<name>.json from `dir` or the bundled defaults.
ProfileTable load_profile_table(Profile p, const std::optional<std::filesystem::path>& dir = std::nullopt);

/// Number of non-empty values a record holds at a leaf path.
/// Throws Error(Config) for a path not in the predicate table.
std::size_t leaf_value_count(const LomRecord& lom, std::string_view path);

ProfileReport check_profile(const LomRecord& lom, const ProfileTable& table);
ProfileReport check_profile(const LomRecord& lom, Profile profile);
ProfileReport check_profile(const LomRecord& lom, std::string_view profile_token);

} // namespace fedlibre::metadata
