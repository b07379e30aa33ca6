#include "fedlibre/vocabulary/facets.hpp"

#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"
#include "fedlibre/util/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace fedlibre::vocabulary {

namespace {

constexpr std::array<std::string_view, kFacetCount> kFacetNames{"DISCIPLINE", "RESOURCE_TYPE", "LEVEL", "FORMAT",
                                                                 "AGE"};
constexpr std::array<std::string_view, kFacetCount> kFacetFiles{"discipline", "resource_type", "level", "format",
                                                                 "age"};

constexpr double kDaysPerYear = 365.25;

} // namespace

std::string_view to_string(FacetId id) noexcept
{
    return kFacetNames[static_cast<std::size_t>(id)];
}

std::optional<FacetId> parse_facet_id(std::string_view s) noexcept
{
    for (std::size_t i = 0; i < kFacetCount; ++i) {
        if (kFacetNames[i] == s)
            return static_cast<FacetId>(i);
    }
    return std::nullopt;
}

const std::array<FacetId, kFacetCount>& all_facets() noexcept
{
    static constexpr std::array<FacetId, kFacetCount> all{FacetId::Discipline, FacetId::ResourceType, FacetId::Level,
                                                           FacetId::Format, FacetId::Age};
    return all;
}

std::optional<std::string> FacetScheme::canonical_term(std::string_view value) const
{
    const auto folded = text::fold(value);
    for (const auto& t : terms) {
        if (text::fold(t) == folded)
            return t;
    }
    return std::nullopt;
}

std::optional<std::string> FacetScheme::match(std::string_view value) const
{
    if (auto term = canonical_term(value))
        return term;
    const auto folded = text::fold(value);
    if (folded.empty())
        return std::nullopt;
    if (auto it = aliases.find(folded); it != aliases.end())
        return it->second;
    const std::string* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& [key, term] : aliases) {
        if (key.empty() || key.back() != '/' || key.size() <= best_len)
            continue;
        if (folded.compare(0, key.size(), key) == 0) {
            best = &term;
            best_len = key.size();
        }
    }
    if (best)
        return *best;
    return std::nullopt;
}

bool FacetScheme::contains(std::string_view canonical) const
{
    return std::find(terms.begin(), terms.end(), canonical) != terms.end();
}

std::size_t FacetScheme::index_of(std::string_view canonical) const
{
    return static_cast<std::size_t>(std::find(terms.begin(), terms.end(), canonical) - terms.begin());
}

FacetScheme parse_scheme(std::string_view json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidVocabulary, std::string("facet scheme: ") + e.what());
    }
    FacetScheme scheme;
    const auto id = parse_facet_id(doc.value("facetId", std::string()));
    if (!id)
        throw Error(Errc::InvalidVocabulary, "facet scheme: unknown facetId");
    scheme.id = *id;
    std::set<std::string> folded_terms;
    for (const auto& t : doc.value("terms", nlohmann::json::array())) {
        if (!t.is_string())
            throw Error(Errc::InvalidVocabulary, "facet scheme: terms must be strings");
        auto term = t.get<std::string>();
        if (!folded_terms.insert(text::fold(term)).second)
            throw Error(Errc::InvalidVocabulary, "facet scheme: duplicate term '" + term + "'");
        scheme.terms.push_back(std::move(term));
    }
    const auto aliases = doc.value("aliases", nlohmann::json::object());
    if (!aliases.is_object())
        throw Error(Errc::InvalidVocabulary, "facet scheme: aliases must be an object");
    for (const auto& [alias, target] : aliases.items()) {
        if (!target.is_string())
            throw Error(Errc::InvalidVocabulary, "facet scheme: alias '" + alias + "' is not a string");
        const auto canonical = scheme.canonical_term(target.get<std::string>());
        if (!canonical)
            throw Error(Errc::InvalidVocabulary,
                        "facet scheme: alias '" + alias + "' targets unknown term '" + target.get<std::string>() + "'");
        scheme.aliases[text::fold(alias)] = *canonical;
    }
    return scheme;
}

Vocabulary Vocabulary::load(const std::optional<std::filesystem::path>& dir)
{
    Vocabulary v;
    for (std::size_t i = 0; i < kFacetCount; ++i) {
        auto scheme = parse_scheme(load_resource(dir, "facets/" + std::string(kFacetFiles[i]) + ".json"));
        if (scheme.id != static_cast<FacetId>(i))
            throw Error(Errc::InvalidVocabulary,
                        "facets/" + std::string(kFacetFiles[i]) + ".json declares facet " +
                            std::string(to_string(scheme.id)));
        v.schemes_[i] = std::move(scheme);
    }
    if (v.schemes_[static_cast<std::size_t>(FacetId::Age)].terms.size() != 4)
        throw Error(Errc::InvalidVocabulary, "AGE scheme must have exactly four buckets");
    return v;
}

const Vocabulary& Vocabulary::builtin()
{
    static const Vocabulary v = load();
    return v;
}

std::vector<FacetScheme> builtin_schemes()
{
    return Vocabulary::builtin().schemes();
}

std::size_t age_bucket_index(double days) noexcept
{
    const double years = days / kDaysPerYear;
    if (years < 1.0)
        return 0;
    if (years < 2.0)
        return 1;
    if (years < 5.0)
        return 2;
    return 3;
}

const std::string& age_bucket(Timestamp datestamp, Timestamp reference, bool* clamped)
{
    const auto& terms = Vocabulary::builtin().scheme(FacetId::Age).terms;
    const auto seconds = (reference - datestamp).count();
    if (clamped)
        *clamped = seconds < 0;
    if (seconds < 0)
        return terms[0];
    return terms[age_bucket_index(static_cast<double>(seconds) / 86400.0)];
}

std::vector<FacetAssignment> classify(std::string_view record_key, const metadata::MetadataPayload* payload,
                                      Timestamp datestamp, Timestamp reference, const Vocabulary& vocabulary)
{
    using metadata::DcElement;
    std::array<std::set<std::size_t>, kFacetCount> hits;
    const auto feed = [&](FacetId facet, const std::vector<std::string>& values) {
        const auto& scheme = vocabulary.scheme(facet);
        for (const auto& v : values) {
            if (auto term = scheme.match(v))
                hits[static_cast<std::size_t>(facet)].insert(scheme.index_of(*term));
        }
    };

    if (payload) {
        const auto dc = payload->dc_view();
        feed(FacetId::ResourceType, dc.values(DcElement::Type));
        feed(FacetId::Format, dc.values(DcElement::Format));
        feed(FacetId::Format, dc.values(DcElement::Type));
        feed(FacetId::Discipline, dc.values(DcElement::Subject));
        if (const auto* lom = payload->lom()) {
            feed(FacetId::Level, lom->educational.context);
            std::vector<std::string> taxa;
            for (const auto& c : lom->classification)
                for (const auto& path : c.taxon_paths)
                    for (const auto& t : path.taxa) {
                        if (!t.entry.empty())
                            taxa.push_back(t.entry);
                        if (!t.id.empty())
                            taxa.push_back(t.id);
                    }
            feed(FacetId::Discipline, taxa);
        }
    }

    std::vector<FacetAssignment> out;
    for (FacetId facet : all_facets()) {
        const auto& scheme = vocabulary.scheme(facet);
        FacetAssignment a{std::string(record_key), facet, {}};
        if (facet == FacetId::Age) {
            const auto seconds = (reference - datestamp).count();
            const double days = seconds < 0 ? 0.0 : static_cast<double>(seconds) / 86400.0;
            a.terms.push_back(scheme.terms[age_bucket_index(days)]);
        } else {
            for (std::size_t idx : hits[static_cast<std::size_t>(facet)])
                a.terms.push_back(scheme.terms[idx]);
            if (a.terms.empty())
                continue;
        }
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace fedlibre::vocabulary
