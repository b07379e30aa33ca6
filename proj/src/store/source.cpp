#include "fedlibre/store/source.hpp"

#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"

#include <json.hpp>

#include <algorithm>

namespace fedlibre::store {

namespace {
constexpr std::array<std::string_view, 5> kAudiences{"students", "teachers", "researchers", "professionals",
                                                      "general-public"};
} // namespace

std::string_view to_string(Nature n) noexcept
{
    switch (n) {
    case Nature::Public: return "public";
    case Nature::Private: return "private";
    case Nature::Associative: return "associative";
    }
    return "public";
}

std::string_view to_string(AccessMode a) noexcept
{
    switch (a) {
    case AccessMode::OpenFree: return "open-free";
    case AccessMode::FreeRegistration: return "free-registration";
    case AccessMode::Paid: return "paid";
    }
    return "open-free";
}

Nature parse_nature(std::string_view s)
{
    if (s == "public")
        return Nature::Public;
    if (s == "private")
        return Nature::Private;
    if (s == "associative")
        return Nature::Associative;
    throw Error(Errc::BadArgument, "unknown nature '" + std::string(s) + "'");
}

AccessMode parse_access_mode(std::string_view s)
{
    if (s == "open-free")
        return AccessMode::OpenFree;
    if (s == "free-registration")
        return AccessMode::FreeRegistration;
    if (s == "paid")
        return AccessMode::Paid;
    throw Error(Errc::BadArgument, "unknown access mode '" + std::string(s) + "'");
}

bool is_audience(std::string_view s) noexcept
{
    return std::find(kAudiences.begin(), kAudiences.end(), s) != kAudiences.end();
}

bool is_source_slug(std::string_view s) noexcept
{
    if (s.empty() || s.size() > 64)
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    });
}

bool is_http_url(std::string_view s) noexcept
{
    std::string_view rest;
    if (s.substr(0, 7) == "http://")
        rest = s.substr(7);
    else if (s.substr(0, 8) == "https://")
        rest = s.substr(8);
    else
        return false;
    if (rest.empty() || rest.front() == '/' || rest.front() == ':')
        return false;
    return std::none_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\n' || c == '\t'; });
}

void SourceDescriptor::validate() const
{
    if (!is_source_slug(source_id))
        throw Error(Errc::BadArgument, "source id must be a lowercase slug: '" + source_id + "'");
    if (!is_http_url(base_url))
        throw Error(Errc::BadArgument, "base URL must be absolute http(s): '" + base_url + "'");
    for (const auto& a : audience) {
        if (!is_audience(a))
            throw Error(Errc::BadArgument, "unknown audience '" + a + "'");
    }
    if (declared_resource_count && *declared_resource_count < 0)
        throw Error(Errc::BadArgument, "declared resource count must be >= 0");
}

void to_json(nlohmann::json& j, const SourceDescriptor& d)
{
    j = nlohmann::json{
        {"sourceId", d.source_id},
        {"name", d.name},
        {"baseUrl", d.base_url},
        {"nature", to_string(d.nature)},
        {"accessMode", to_string(d.access_mode)},
        {"steward", d.steward},
        {"audience", d.audience},
        {"languages", d.languages},
        {"declaredResourceCount", d.declared_resource_count ? nlohmann::json(*d.declared_resource_count) : nullptr},
        {"levels", d.levels},
        {"metadataPrefix", metadata::metadata_prefix(d.metadata_prefix)},
        {"enabled", d.enabled},
    };
}

void from_json(const nlohmann::json& j, SourceDescriptor& d)
{
    d.source_id = j.at("sourceId").get<std::string>();
    d.name = j.value("name", std::string());
    d.base_url = j.at("baseUrl").get<std::string>();
    d.nature = parse_nature(j.value("nature", std::string("public")));
    d.access_mode = parse_access_mode(j.value("accessMode", std::string("open-free")));
    d.steward = j.value("steward", std::string());
    d.audience = j.value("audience", std::vector<std::string>{});
    d.languages = j.value("languages", std::vector<std::string>{});
    if (j.contains("declaredResourceCount") && !j["declaredResourceCount"].is_null())
        d.declared_resource_count = j["declaredResourceCount"].get<std::int64_t>();
    else
        d.declared_resource_count.reset();
    d.levels = j.value("levels", std::vector<std::string>{});
    const auto prefix = metadata::schema_from_prefix(j.value("metadataPrefix", std::string("oai_dc")));
    if (!prefix)
        throw Error(Errc::BadArgument, "unsupported metadataPrefix for source " + d.source_id);
    d.metadata_prefix = *prefix;
    d.enabled = j.value("enabled", true);
}

SourceRegistry::SourceRegistry(std::filesystem::path dir)
{
    std::filesystem::create_directories(dir);
    path_ = dir / "registry.json";
}

std::vector<SourceDescriptor> SourceRegistry::load() const
{
    if (!std::filesystem::exists(path_))
        return {};
    try {
        const auto doc = nlohmann::json::parse(read_file(path_));
        return doc.at("sources").get<std::vector<SourceDescriptor>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::StorageFailure, "registry.json: " + std::string(e.what()));
    }
}

void SourceRegistry::save(const std::vector<SourceDescriptor>& all) const
{
    nlohmann::json doc{{"sources", all}};
    write_file_atomic(path_, doc.dump(2) + "\n");
}

void SourceRegistry::add(const SourceDescriptor& d)
{
    d.validate();
    std::lock_guard lock(mutex_);
    auto all = load();
    for (const auto& existing : all) {
        if (existing.source_id == d.source_id)
            throw Error(Errc::DuplicateSource, "source '" + d.source_id + "' already registered");
    }
    all.push_back(d);
    save(all);
}

std::vector<SourceDescriptor> SourceRegistry::list() const
{
    std::lock_guard lock(mutex_);
    return load();
}

std::optional<SourceDescriptor> SourceRegistry::find(std::string_view source_id) const
{
    std::lock_guard lock(mutex_);
    for (auto& d : load()) {
        if (d.source_id == source_id)
            return d;
    }
    return std::nullopt;
}

SourceDescriptor SourceRegistry::get(std::string_view source_id) const
{
    if (auto d = find(source_id))
        return *d;
    throw Error(Errc::UnknownSource, "no source '" + std::string(source_id) + "'");
}

void SourceRegistry::set_enabled(std::string_view source_id, bool enabled)
{
    std::lock_guard lock(mutex_);
    auto all = load();
    for (auto& d : all) {
        if (d.source_id == source_id) {
            d.enabled = enabled;
            save(all);
            return;
        }
    }
    throw Error(Errc::UnknownSource, "no source '" + std::string(source_id) + "'");
}

} // namespace fedlibre::store
