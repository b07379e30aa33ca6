#pragma once

#include "fedlibre/metadata/payload.hpp"
#include "fedlibre/util/time.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre::vocabulary {

enum class FacetId { Discipline, ResourceType, Level, Format, Age };

inline constexpr std::size_t kFacetCount = 5;

std::string_view to_string(FacetId id) noexcept;
std::optional<FacetId> parse_facet_id(std::string_view s) noexcept;
const std::array<FacetId, kFacetCount>& all_facets() noexcept;

/// A controlled vocabulary for one facet. Alias keys are stored folded; an
/// alias key ending in '/' matches any value that starts with it (MIME
/// major types such as "video/").
struct FacetScheme {
    FacetId id = FacetId::Discipline;
    std::vector<std::string> terms;
    std::map<std::string, std::string> aliases;

    /// Canonical term for a harvested value: folded term name, exact alias,
    /// then the longest matching prefix alias.
    std::optional<std::string> match(std::string_view value) const;
    /// Canonical term whose folded form equals the folded input.
    std::optional<std::string> canonical_term(std::string_view value) const;
    bool contains(std::string_view canonical) const;
    std::size_t index_of(std::string_view canonical) const;
};

/// Parses {"facetId": ..., "terms": [...], "aliases": {...}}; throws
/// Error(InvalidVocabulary) when terms collide after folding or an alias
/// points at a term that does not exist.
FacetScheme parse_scheme(std::string_view json_text);

class Vocabulary {
public:
    /// The bundled schemes, overridden file-by-file from `dir/facets/`.
    static Vocabulary load(const std::optional<std::filesystem::path>& dir = std::nullopt);
    static const Vocabulary& builtin();

    const FacetScheme& scheme(FacetId id) const { return schemes_[static_cast<std::size_t>(id)]; }
    std::vector<FacetScheme> schemes() const { return {schemes_.begin(), schemes_.end()}; }

private:
    std::array<FacetScheme, kFacetCount> schemes_;
};

/// The five facet schemes with the portal's vocabularies, in facet order.
std::vector<FacetScheme> builtin_schemes();

struct FacetAssignment {
    std::string record_key;
    FacetId facet = FacetId::Age;
    std::vector<std::string> terms;

    friend bool operator==(const FacetAssignment&, const FacetAssignment&) = default;
};

/// Age bucket index 0..3 for an elapsed time in days (365.25-day years,
/// lower-inclusive boundaries at 1, 2 and 5 years).
std::size_t age_bucket_index(double days) noexcept;

/// AGE term for a record. A datestamp after `reference` is clamped into the
/// first bucket and `clamped` is set.
const std::string& age_bucket(Timestamp datestamp, Timestamp reference, bool* clamped = nullptr);

/// Facet assignments in facet order, terms in scheme order. AGE is always
/// present; other facets only when some value matched. A null payload
/// (deleted record) yields AGE alone.
std::vector<FacetAssignment> classify(std::string_view record_key, const metadata::MetadataPayload* payload,
                                      Timestamp datestamp, Timestamp reference,
                                      const Vocabulary& vocabulary = Vocabulary::builtin());

} // namespace fedlibre::vocabulary
