#pragma once

#include "fedlibre/metadata/dublin_core.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre::metadata {

/// The nine LOM categories, in document order.
enum class LomCategory : std::size_t {
    General,
    LifeCycle,
    MetaMetadata,
    Technical,
    Educational,
    Relation,
    Rights,
    Annotation,
    Classification,
};

inline constexpr std::size_t kLomCategoryCount = 9;

std::string_view category_element(LomCategory c) noexcept;

struct LomIdentifier {
    std::string catalog;
    std::string entry;
    friend bool operator==(const LomIdentifier&, const LomIdentifier&) = default;
};

struct LomGeneral {
    std::vector<LomIdentifier> identifier;
    std::vector<LangString> title;
    std::vector<std::string> language;
    std::vector<LangString> description;
    std::vector<LangString> keyword;
    friend bool operator==(const LomGeneral&, const LomGeneral&) = default;
};

struct LomContribution {
    std::string role;
    std::string entity; // usually a vCard
    std::string date;
    friend bool operator==(const LomContribution&, const LomContribution&) = default;
};

struct LomLifeCycle {
    std::vector<LangString> version;
    std::vector<LomContribution> contribute;
    friend bool operator==(const LomLifeCycle&, const LomLifeCycle&) = default;
};

struct LomMetaMetadata {
    /// Canonical profile token, e.g. "LOMv1.0", "LOMFRv1.0", "SupLOMFRv1.0".
    std::optional<std::string> schema;
    friend bool operator==(const LomMetaMetadata&, const LomMetaMetadata&) = default;
};

struct LomTechnical {
    std::vector<std::string> format;
    std::optional<std::uint64_t> size_bytes;
    std::vector<std::string> location;
    std::optional<std::int64_t> duration_seconds;
    friend bool operator==(const LomTechnical&, const LomTechnical&) = default;
};

struct LomEducational {
    std::vector<std::string> resource_type;
    std::vector<std::string> intended_end_user_role;
    std::vector<std::string> context;
    std::optional<std::string> typical_age_range;
    std::optional<std::int64_t> typical_learning_time_seconds;
    std::vector<std::string> language;
    friend bool operator==(const LomEducational&, const LomEducational&) = default;
};

struct LomRelation {
    std::string kind;
    std::string target;
    friend bool operator==(const LomRelation&, const LomRelation&) = default;
};

struct LomRights {
    std::optional<bool> cost;
    std::optional<bool> copyright;
    std::vector<LangString> description;
    friend bool operator==(const LomRights&, const LomRights&) = default;
};

struct LomAnnotation {
    std::string entity;
    std::string date;
    LangString description;
    friend bool operator==(const LomAnnotation&, const LomAnnotation&) = default;
};

struct LomTaxon {
    std::string id;
    std::string entry;
    friend bool operator==(const LomTaxon&, const LomTaxon&) = default;
};

struct LomTaxonPath {
    std::string source;
    std::vector<LomTaxon> taxa;
    friend bool operator==(const LomTaxonPath&, const LomTaxonPath&) = default;
};

struct LomClassification {
    std::string purpose;
    std::vector<LomTaxonPath> taxon_paths;
    friend bool operator==(const LomClassification&, const LomClassification&) = default;
};

struct LomRecord {
    LomGeneral general;
    LomLifeCycle life_cycle;
    LomMetaMetadata meta_metadata;
    LomTechnical technical;
    LomEducational educational;
    std::vector<LomRelation> relation;
    LomRights rights;
    std::vector<LomAnnotation> annotation;
    std::vector<LomClassification> classification;

    /// Which category elements appeared in the source document.
    std::array<bool, kLomCategoryCount> present{};

    bool has(LomCategory c) const { return present[static_cast<std::size_t>(c)]; }
    void mark(LomCategory c) { present[static_cast<std::size_t>(c)] = true; }

    friend bool operator==(const LomRecord&, const LomRecord&) = default;
};

/// Accepted metaMetadata schema tokens; anything else is dropped at parse
/// time with a warning.
const std::vector<std::string>& accepted_schema_tokens();
std::optional<std::string> canonical_schema_token(std::string_view raw);

/// ISO-8601 duration restricted to the D/H/M/S designators ("P1DT2H",
/// "PT1H30M", "PT0.5S"). Year and month designators are rejected.
/// Throws Error(MalformedXml).
std::int64_t parse_duration(std::string_view iso);
std::string format_duration(std::int64_t seconds);

/// Display name of a vCard entity (its FN property), or the raw text when it
/// is not a vCard.
std::string entity_display_name(std::string_view entity);

LomRecord parse_lom(std::string_view xml, std::vector<std::string>* warnings = nullptr);

} // namespace fedlibre::metadata
