#include "fedlibre/metadata/payload.hpp"

#include "fedlibre/metadata/crosswalk.hpp"

namespace fedlibre::metadata {

std::string_view metadata_prefix(SchemaTag tag) noexcept
{
    return tag == SchemaTag::Lom ? "lom" : "oai_dc";
}

std::optional<SchemaTag> schema_from_prefix(std::string_view prefix) noexcept
{
    if (prefix == "oai_dc")
        return SchemaTag::OaiDc;
    if (prefix == "lom")
        return SchemaTag::Lom;
    return std::nullopt;
}

MetadataPayload MetadataPayload::parse(SchemaTag tag, std::string raw, std::vector<std::string>* warnings)
{
    if (tag == SchemaTag::Lom) {
        auto record = parse_lom(raw, warnings);
        return MetadataPayload(tag, std::move(record), std::move(raw));
    }
    auto record = parse_dc(raw, warnings);
    return MetadataPayload(tag, std::move(record), std::move(raw));
}

DublinCoreRecord MetadataPayload::dc_view() const
{
    if (const auto* d = dc())
        return *d;
    return crosswalk_lom_to_dc(*lom()).dc;
}

std::optional<std::string> resource_url(const MetadataPayload& payload)
{
    const auto is_web = [](std::string_view s) { return s.starts_with("http://") || s.starts_with("https://"); };
    if (const auto* l = payload.lom()) {
        for (const auto& loc : l->technical.location)
            if (is_web(loc))
                return loc;
    }
    for (const auto& id : payload.dc_view().values(DcElement::Identifier))
        if (is_web(id))
            return id;
    return std::nullopt;
}

} // namespace fedlibre::metadata
