#include "fedlibre/metadata/profile.hpp"

#include "fedlibre/metadata/triples.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"
#include "fedlibre/util/text.hpp"

#include <json.hpp>

namespace fedlibre::metadata {

namespace {

constexpr std::string_view kProbeSubject = "urn:x-probe:record";

bool known_path(std::string_view path)
{
    for (const auto& row : predicate_table()) {
        if (row.path == path)
            return true;
    }
    return false;
}

std::string_view file_stem(Profile p)
{
    switch (p) {
    case Profile::Lom: return "lom";
    case Profile::LomFr: return "lomfr";
    case Profile::SupLomFr: return "suplomfr";
    }
    return "lom";
}

} // namespace

std::string_view to_string(Profile p) noexcept
{
    switch (p) {
    case Profile::Lom: return "LOM";
    case Profile::LomFr: return "LOMFR";
    case Profile::SupLomFr: return "SUPLOMFR";
    }
    return "LOM";
}

Profile parse_profile(std::string_view token)
{
    const auto lower = text::to_lower_ascii(token);
    if (lower == "lom")
        return Profile::Lom;
    if (lower == "lomfr")
        return Profile::LomFr;
    if (lower == "suplomfr")
        return Profile::SupLomFr;
    throw Error(Errc::UnknownProfile, "unknown profile '" + std::string(token) + "'");
}

ProfileTable parse_profile_table(std::string_view json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Config, std::string("profile table: ") + e.what());
    }
    ProfileTable table;
    table.profile = parse_profile(doc.at("profile").get<std::string>());
    for (const auto* key : {"mandatory", "recommended"}) {
        auto& target = std::string_view(key) == "mandatory" ? table.mandatory : table.recommended;
        for (const auto& p : doc.value(key, nlohmann::json::array())) {
            auto path = p.get<std::string>();
            if (!known_path(path))
                throw Error(Errc::Config, "profile table: unknown element path '" + path + "'");
            target.push_back(std::move(path));
        }
    }
    return table;
}

ProfileTable load_profile_table(Profile p, const std::optional<std::filesystem::path>& dir)
{
    auto table = parse_profile_table(load_resource(dir, "profiles/" + std::string(file_stem(p)) + ".json"));
    if (table.profile != p)
        throw Error(Errc::Config, "profile table for " + std::string(to_string(p)) + " declares another profile");
    return table;
}

std::size_t leaf_value_count(const LomRecord& lom, std::string_view path)
{
    if (!known_path(path))
        throw Error(Errc::Config, "unknown element path '" + std::string(path) + "'");
    std::string predicate;
    for (const auto& row : predicate_table()) {
        if (row.path == path)
            predicate = row.predicate;
    }
    std::size_t n = 0;
    for (const auto& t : lom_to_triples(lom, kProbeSubject)) {
        if (t.predicate == predicate)
            ++n;
    }
    return n;
}

ProfileReport check_profile(const LomRecord& lom, const ProfileTable& table)
{
    ProfileReport report;
    report.profile = table.profile;
    const auto triples = lom_to_triples(lom, kProbeSubject);
    const auto present = [&](const std::string& path) {
        for (const auto& row : predicate_table()) {
            if (row.path != path)
                continue;
            for (const auto& t : triples) {
                if (t.predicate == row.predicate)
                    return true;
            }
        }
        return false;
    };
    for (const auto& path : table.mandatory) {
        if (!present(path))
            report.missing_mandatory.push_back(path);
    }
    for (const auto& path : table.recommended) {
        if (present(path))
            report.present_recommended.push_back(path);
    }
    report.conformant = report.missing_mandatory.empty();
    return report;
}

ProfileReport check_profile(const LomRecord& lom, Profile profile)
{
    return check_profile(lom, load_profile_table(profile));
}

ProfileReport check_profile(const LomRecord& lom, std::string_view profile_token)
{
    return check_profile(lom, parse_profile(profile_token));
}

} // namespace fedlibre::metadata
