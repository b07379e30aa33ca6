#pragma once

#include "fedlibre/metadata/dublin_core.hpp"
#include "fedlibre/metadata/lom.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace fedlibre::metadata {

enum class SchemaTag { OaiDc, Lom };

/// OAI metadataPrefix for a schema: "oai_dc" or "lom".
std::string_view metadata_prefix(SchemaTag tag) noexcept;
std::optional<SchemaTag> schema_from_prefix(std::string_view prefix) noexcept;

/// A parsed metadata record together with the exact bytes it came from.
/// Equality compares the schema and the parsed record only.
class MetadataPayload {
public:
    /// Parses `raw` according to `tag`. Throws MalformedXml / WrongNamespace.
    static MetadataPayload parse(SchemaTag tag, std::string raw, std::vector<std::string>* warnings = nullptr);

    SchemaTag schema() const noexcept { return schema_; }
    const std::string& raw_xml() const noexcept { return raw_; }

    bool is_lom() const noexcept { return schema_ == SchemaTag::Lom; }
    const DublinCoreRecord* dc() const noexcept { return std::get_if<DublinCoreRecord>(&record_); }
    const LomRecord* lom() const noexcept { return std::get_if<LomRecord>(&record_); }

    /// Dublin Core view of the record; LOM records go through the crosswalk.
    DublinCoreRecord dc_view() const;

    friend bool operator==(const MetadataPayload& a, const MetadataPayload& b)
    {
        return a.schema_ == b.schema_ && a.record_ == b.record_;
    }

private:
    MetadataPayload(SchemaTag tag, std::variant<DublinCoreRecord, LomRecord> record, std::string raw)
        : schema_(tag), record_(std::move(record)), raw_(std::move(raw))
    {
    }

    SchemaTag schema_;
    std::variant<DublinCoreRecord, LomRecord> record_;
    std::string raw_;
};

/// Where the described resource lives: the first http(s) technical.location
/// of a LOM record, else the first http(s) dc:identifier.
std::optional<std::string> resource_url(const MetadataPayload& payload);

} // namespace fedlibre::metadata
