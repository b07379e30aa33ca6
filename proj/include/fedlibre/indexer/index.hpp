#pragma once

#include "fedlibre/store/record_store.hpp"
#include "fedlibre/util/time.hpp"
#include "fedlibre/vocabulary/facets.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace fedlibre::indexer {

using StopwordSet = std::unordered_set<std::string>;

/// French and English lists from `stopwords/fr.txt` and `stopwords/en.txt`,
/// bundled or overridden from `dir`.
StopwordSet load_stopwords(const std::optional<std::filesystem::path>& dir = std::nullopt);
const StopwordSet& default_stopwords();

struct Token {
    std::string term;
    std::uint32_t position = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

/// Folded word tokens with 0-based positions counted before stopword removal.
std::vector<Token> tokenize(std::string_view text, const StopwordSet& stopwords);
std::vector<Token> tokenize(std::string_view text);

/// (1 + ln tf) * ln(N / df); zero when tf or df is zero.
double tfidf(std::uint64_t tf, std::uint64_t df, std::uint64_t n);

struct Posting {
    std::uint32_t doc = 0;
    std::vector<std::uint32_t> positions;

    std::uint32_t tf() const noexcept { return static_cast<std::uint32_t>(positions.size()); }
    friend bool operator==(const Posting&, const Posting&) = default;
};

struct IndexedDoc {
    std::string key;
    std::string source_id;
    Timestamp datestamp{};
    std::string title;
    std::string snippet;
    std::string link; // original resource URL, may be empty

    friend bool operator==(const IndexedDoc&, const IndexedDoc&) = default;
};

/// Immutable inverted index over the published records of one store
/// snapshot. Document ids follow key order.
class PostingsIndex {
public:
    std::size_t doc_count() const noexcept { return docs_.size(); }
    const std::vector<IndexedDoc>& docs() const noexcept { return docs_; }
    std::optional<std::uint32_t> doc_id(std::string_view key) const;
    double norm(std::uint32_t doc) const { return norms_[doc]; }

    std::uint64_t df(std::string_view term) const;
    /// Null when the term is not in the vocabulary.
    const std::vector<Posting>* postings(std::string_view term) const;
    std::size_t vocabulary_size() const noexcept { return postings_.size(); }

    /// Doc ids carrying `term` for `facet`, ascending.
    const std::vector<std::uint32_t>& facet_docs(vocabulary::FacetId facet, std::string_view term) const;
    /// Scheme terms known at build time, in scheme order.
    const std::vector<std::string>& facet_terms(vocabulary::FacetId facet) const;

    const StopwordSet& stopwords() const noexcept { return stopwords_; }
    Timestamp reference() const noexcept { return reference_; }

    std::string to_json() const;
    /// Throws Error(StorageFailure) on malformed input.
    static PostingsIndex from_json(std::string_view text);
    void save(const std::filesystem::path& file) const;
    /// Throws Error(NotFound) when the file does not exist.
    static PostingsIndex load(const std::filesystem::path& file);

    friend bool operator==(const PostingsIndex& a, const PostingsIndex& b);

private:
    friend class IndexBuilder;
    void finish();

    std::vector<IndexedDoc> docs_;
    std::unordered_map<std::string, std::uint32_t> key_to_doc_;
    std::map<std::string, std::vector<Posting>, std::less<>> postings_;
    std::vector<double> norms_;
    std::array<std::map<std::string, std::vector<std::uint32_t>, std::less<>>, vocabulary::kFacetCount> facets_;
    std::array<std::vector<std::string>, vocabulary::kFacetCount> facet_terms_;
    StopwordSet stopwords_;
    Timestamp reference_{};
};

struct BuildOptions {
    /// AGE buckets are computed against this instant.
    Timestamp reference{};
    const vocabulary::Vocabulary* vocabulary = nullptr; // builtin when null
    const StopwordSet* stopwords = nullptr;             // default lists when null
};

/// Indexes title, description and subject of every PUBLISHED record.
PostingsIndex build_index(const std::vector<store::RecordPtr>& snapshot, const BuildOptions& options);
PostingsIndex build_index(const store::RecordStore& store, const BuildOptions& options);

enum class QueryMode { AllWords, AnyWord, ExactPhrase };

std::string_view to_string(QueryMode m) noexcept;
/// Accepts "all", "any", "phrase" and the ALL_WORDS style names.
std::optional<QueryMode> parse_query_mode(std::string_view s) noexcept;

inline constexpr std::size_t kMaxPageSize = 100;

struct SearchQuery {
    std::string text;
    QueryMode mode = QueryMode::AllWords;
    std::map<vocabulary::FacetId, std::set<std::string>> facets;
    std::size_t page = 1;
    std::size_t page_size = 20;
};

struct SearchHit {
    std::string key;
    double score = 0;
    std::string title;
    std::string snippet;
    std::string source_id;
    Timestamp datestamp{};
    std::string link;
};

struct FacetCount {
    std::string term;
    std::size_t count = 0;
};

struct SearchResult {
    std::size_t total_hits = 0;
    std::vector<SearchHit> hits;
    /// Every scheme term with its count over the full match set.
    std::map<vocabulary::FacetId, std::vector<FacetCount>> facet_counts;
};

/// Throws EmptyQuery when there are neither tokens nor facet selections,
/// BadPage when page < 1 or page_size is outside 1..100.
SearchResult search(const PostingsIndex& index, const SearchQuery& query);

/// The whole ranked match set, ignoring paging.
std::vector<SearchHit> search_all(const PostingsIndex& index, const SearchQuery& query);

/// Holder for the current snapshot. Readers keep their shared_ptr for as
/// long as they need it; `set` never waits for them.
class IndexHandle {
public:
    std::shared_ptr<const PostingsIndex> get() const;
    void set(std::shared_ptr<const PostingsIndex> index);

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const PostingsIndex> current_;
};

/// Index file inside a store directory.
std::filesystem::path index_path(const std::filesystem::path& store_dir);

} // namespace fedlibre::indexer
