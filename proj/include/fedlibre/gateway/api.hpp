#pragma once

#include "fedlibre/indexer/index.hpp"
#include "fedlibre/store/record_store.hpp"
#include "fedlibre/store/source.hpp"
#include "fedlibre/vocabulary/facets.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fedlibre::gateway {

enum class Lang { Fr, En };

std::string_view to_string(Lang l) noexcept;
std::optional<Lang> parse_lang(std::string_view s) noexcept;

/// Interface labels for facet names and terms. French labels of terms are
/// the canonical terms themselves.
class Labels {
public:
    /// `labels.json`, bundled or from `dir`.
    static Labels load(const std::optional<std::filesystem::path>& dir = std::nullopt);
    static const Labels& builtin();

    std::string facet(vocabulary::FacetId id, Lang lang) const;
    std::string term(const std::string& canonical, Lang lang) const;

private:
    std::map<vocabulary::FacetId, std::map<Lang, std::string>> facets_;
    std::map<std::string, std::string> english_;
};

/// "FACET=term" as given in the facet query parameter. Throws
/// Error(BadArgument) for a missing '=', an unknown facet id or an empty term.
std::pair<vocabulary::FacetId, std::string> parse_facet_token(std::string_view token);

/// Builds a SearchQuery from raw parameters (q, mode, facet, page,
/// pageSize). Throws BadArgument or BadPage.
indexer::SearchQuery parse_search_params(const std::vector<std::pair<std::string, std::string>>& params);

/// Detail page URL of a record under `public_url`.
std::string detail_url(std::string_view public_url, std::string_view key);

/// The /api/search body. The CLI prints the same document for `query --json`.
nlohmann::json search_response(const indexer::SearchQuery& query, const indexer::SearchResult& result, Lang lang,
                               const Labels& labels, std::string_view public_url);

/// The /api/facets body: every scheme with its localized labels.
nlohmann::json facets_response(const vocabulary::Vocabulary& vocabulary, Lang lang, const Labels& labels);

/// The /api/records/{key} body.
nlohmann::json record_detail(const store::StoredRecord& record, const std::optional<store::SourceDescriptor>& source,
                             Lang lang, const Labels& labels, std::string_view public_url);

nlohmann::json dc_to_json(const metadata::DublinCoreRecord& dc);
nlohmann::json lom_to_json(const metadata::LomRecord& lom);

nlohmann::json error_body(std::string_view code, std::string_view message);

struct FeedOptions {
    std::string title = "fedora-libre";
    std::string public_url = "http://localhost:8080";
    std::size_t limit = 20;
};

/// RSS 2.0 channel of the `limit` most recent PUBLISHED records, newest
/// first (ties by key).
std::string rss_feed(const std::vector<store::RecordPtr>& records, const FeedOptions& options);

} // namespace fedlibre::gateway
