#pragma once

#include "fedlibre/metadata/payload.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fedlibre::store {

enum class Nature { Public, Private, Associative };
enum class AccessMode { OpenFree, FreeRegistration, Paid };

std::string_view to_string(Nature n) noexcept;
std::string_view to_string(AccessMode a) noexcept;
Nature parse_nature(std::string_view s);
AccessMode parse_access_mode(std::string_view s);

/// Accepted audience tokens: students, teachers, researchers,
/// professionals, general-public.
bool is_audience(std::string_view s) noexcept;

/// Registry entry for a partner repository, following the portal
/// categorization grid (name, nature, access mode, steward, audience,
/// languages, declared size, academic levels).
struct SourceDescriptor {
    std::string source_id;
    std::string name;
    std::string base_url;
    Nature nature = Nature::Public;
    AccessMode access_mode = AccessMode::OpenFree;
    std::string steward;
    std::vector<std::string> audience;
    std::vector<std::string> languages;
    std::optional<std::int64_t> declared_resource_count;
    std::vector<std::string> levels;
    metadata::SchemaTag metadata_prefix = metadata::SchemaTag::OaiDc;
    bool enabled = true;

    /// Throws Error(BadArgument) on a malformed slug, URL, audience or count.
    void validate() const;

    friend bool operator==(const SourceDescriptor&, const SourceDescriptor&) = default;
};

void to_json(nlohmann::json& j, const SourceDescriptor& d);
void from_json(const nlohmann::json& j, SourceDescriptor& d);

bool is_source_slug(std::string_view s) noexcept;
bool is_http_url(std::string_view s) noexcept;

/// Source registry persisted as registry.json (temp file + rename).
class SourceRegistry {
public:
    explicit SourceRegistry(std::filesystem::path dir);

    /// Throws DuplicateSource.
    void add(const SourceDescriptor& d);
    std::vector<SourceDescriptor> list() const;
    /// Throws UnknownSource.
    SourceDescriptor get(std::string_view source_id) const;
    std::optional<SourceDescriptor> find(std::string_view source_id) const;
    /// Throws UnknownSource.
    void set_enabled(std::string_view source_id, bool enabled);

private:
    std::vector<SourceDescriptor> load() const;
    void save(const std::vector<SourceDescriptor>& all) const;

    std::filesystem::path path_;
    mutable std::mutex mutex_;
};

} // namespace fedlibre::store
