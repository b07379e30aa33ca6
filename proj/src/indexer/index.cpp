#include "fedlibre/indexer/index.hpp"

#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"
#include "fedlibre/util/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fedlibre::indexer {

using vocabulary::FacetId;
using json = nlohmann::json;

namespace {

void add_stopwords(StopwordSet& out, std::string_view file)
{
    for (const auto& line : text::split(file, '\n')) {
        const auto word = text::trim(line);
        if (word.empty() || word.front() == '#')
            continue;
        out.insert(text::fold(word));
    }
}

/// Every word token in order, stopwords included.
std::vector<std::string> raw_tokens(std::string_view s)
{
    std::vector<std::string> out;
    std::u32string current;
    std::u32string folded;
    const auto flush = [&] {
        if (!current.empty()) {
            out.push_back(text::encode_utf8(current));
            current.clear();
        }
    };
    for (char32_t cp : text::decode_utf8(s)) {
        if (!text::is_word_char(cp)) {
            flush();
            continue;
        }
        folded.clear();
        text::fold_code_point(cp, folded);
        current += folded;
    }
    flush();
    return out;
}

std::size_t facet_index(FacetId f) { return static_cast<std::size_t>(f); }

/// Positions left empty between indexed values, wide enough that a phrase
/// whose stopwords act as wildcards cannot bridge two values.
constexpr std::uint32_t kValueGap = 64;

} // namespace

StopwordSet load_stopwords(const std::optional<std::filesystem::path>& dir)
{
    StopwordSet out;
    add_stopwords(out, load_resource(dir, "stopwords/fr.txt"));
    add_stopwords(out, load_resource(dir, "stopwords/en.txt"));
    return out;
}

const StopwordSet& default_stopwords()
{
    static const StopwordSet set = load_stopwords();
    return set;
}

std::vector<Token> tokenize(std::string_view s, const StopwordSet& stopwords)
{
    std::vector<Token> out;
    std::uint32_t pos = 0;
    for (auto& t : raw_tokens(s)) {
        if (!stopwords.contains(t))
            out.push_back({std::move(t), pos});
        ++pos;
    }
    return out;
}

std::vector<Token> tokenize(std::string_view s) { return tokenize(s, default_stopwords()); }

double tfidf(std::uint64_t tf, std::uint64_t df, std::uint64_t n)
{
    if (tf == 0 || df == 0 || n == 0)
        return 0.0;
    return (1.0 + std::log(static_cast<double>(tf))) * std::log(static_cast<double>(n) / static_cast<double>(df));
}

// ---------------------------------------------------------------------------

std::optional<std::uint32_t> PostingsIndex::doc_id(std::string_view key) const
{
    auto it = key_to_doc_.find(std::string(key));
    if (it == key_to_doc_.end())
        return std::nullopt;
    return it->second;
}

std::uint64_t PostingsIndex::df(std::string_view term) const
{
    const auto* p = postings(term);
    return p ? p->size() : 0;
}

const std::vector<Posting>* PostingsIndex::postings(std::string_view term) const
{
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

const std::vector<std::uint32_t>& PostingsIndex::facet_docs(FacetId facet, std::string_view term) const
{
    static const std::vector<std::uint32_t> none;
    const auto& table = facets_[facet_index(facet)];
    auto it = table.find(term);
    return it == table.end() ? none : it->second;
}

const std::vector<std::string>& PostingsIndex::facet_terms(FacetId facet) const
{
    return facet_terms_[facet_index(facet)];
}

void PostingsIndex::finish()
{
    key_to_doc_.clear();
    for (std::uint32_t i = 0; i < docs_.size(); ++i)
        key_to_doc_.emplace(docs_[i].key, i);
    norms_.assign(docs_.size(), 0.0);
    const auto n = docs_.size();
    for (const auto& [term, list] : postings_) {
        for (const auto& p : list) {
            const double w = tfidf(p.tf(), list.size(), n);
            norms_[p.doc] += w * w;
        }
    }
    for (auto& v : norms_)
        v = std::sqrt(v);
}

bool operator==(const PostingsIndex& a, const PostingsIndex& b)
{
    return a.docs_ == b.docs_ && a.postings_ == b.postings_ && a.facets_ == b.facets_ &&
           a.facet_terms_ == b.facet_terms_ && a.stopwords_ == b.stopwords_ && a.reference_ == b.reference_;
}

std::string PostingsIndex::to_json() const
{
    json j;
    j["reference"] = format_utc(reference_);
    auto& docs = j["docs"] = json::array();
    for (const auto& d : docs_) {
        docs.push_back({{"key", d.key},
                        {"sourceId", d.source_id},
                        {"datestamp", format_utc(d.datestamp)},
                        {"title", d.title},
                        {"snippet", d.snippet},
                        {"link", d.link}});
    }
    auto& terms = j["postings"] = json::object();
    for (const auto& [term, list] : postings_) {
        auto& arr = terms[term] = json::array();
        for (const auto& p : list)
            arr.push_back(json::array({p.doc, p.positions}));
    }
    auto& facets = j["facets"] = json::object();
    for (auto f : vocabulary::all_facets()) {
        auto& entry = facets[std::string(vocabulary::to_string(f))];
        entry["terms"] = facet_terms_[facet_index(f)];
        entry["docs"] = facets_[facet_index(f)];
    }
    std::vector<std::string> stop(stopwords_.begin(), stopwords_.end());
    std::sort(stop.begin(), stop.end());
    j["stopwords"] = stop;
    return j.dump();
}

PostingsIndex PostingsIndex::from_json(std::string_view text)
{
    PostingsIndex idx;
    try {
        const auto j = json::parse(text);
        idx.reference_ = parse_utc(j.at("reference").get<std::string>()).value_or(Timestamp{});
        for (const auto& d : j.at("docs")) {
            IndexedDoc doc;
            doc.key = d.at("key").get<std::string>();
            doc.source_id = d.at("sourceId").get<std::string>();
            doc.datestamp = parse_utc(d.at("datestamp").get<std::string>()).value_or(Timestamp{});
            doc.title = d.at("title").get<std::string>();
            doc.snippet = d.at("snippet").get<std::string>();
            doc.link = d.value("link", "");
            idx.docs_.push_back(std::move(doc));
        }
        const auto& postings = j.at("postings");
        for (auto it = postings.begin(); it != postings.end(); ++it) {
            auto& list = idx.postings_[it.key()];
            for (const auto& p : it.value()) {
                Posting posting;
                posting.doc = p.at(0).get<std::uint32_t>();
                posting.positions = p.at(1).get<std::vector<std::uint32_t>>();
                if (posting.doc >= idx.docs_.size())
                    throw Error(Errc::StorageFailure, "index: posting refers to unknown document");
                list.push_back(std::move(posting));
            }
        }
        const auto& facets = j.at("facets");
        for (auto f : vocabulary::all_facets()) {
            const auto name = std::string(vocabulary::to_string(f));
            if (!facets.contains(name))
                continue;
            const auto& entry = facets.at(name);
            idx.facet_terms_[facet_index(f)] = entry.at("terms").get<std::vector<std::string>>();
            for (auto it = entry.at("docs").begin(); it != entry.at("docs").end(); ++it)
                idx.facets_[facet_index(f)][it.key()] = it.value().get<std::vector<std::uint32_t>>();
        }
        for (const auto& w : j.at("stopwords"))
            idx.stopwords_.insert(w.get<std::string>());
    } catch (const json::exception& e) {
        throw Error(Errc::StorageFailure, std::string("index: ") + e.what());
    }
    idx.finish();
    return idx;
}

void PostingsIndex::save(const std::filesystem::path& file) const { write_file_atomic(file, to_json()); }

PostingsIndex PostingsIndex::load(const std::filesystem::path& file)
{
    if (!std::filesystem::exists(file))
        throw Error(Errc::NotFound, "no index at " + file.string() + "; run 'index rebuild'");
    return from_json(read_file(file));
}

// ---------------------------------------------------------------------------

class IndexBuilder {
public:
    static PostingsIndex build(const std::vector<store::RecordPtr>& snapshot, const BuildOptions& options)
    {
        const auto& vocab = options.vocabulary ? *options.vocabulary : vocabulary::Vocabulary::builtin();
        PostingsIndex idx;
        idx.reference_ = options.reference;
        idx.stopwords_ = options.stopwords ? *options.stopwords : default_stopwords();
        for (auto f : vocabulary::all_facets())
            idx.facet_terms_[facet_index(f)] = vocab.scheme(f).terms;

        std::vector<store::RecordPtr> published;
        for (const auto& r : snapshot)
            if (r && r->searchable() && r->envelope.payload)
                published.push_back(r);
        std::sort(published.begin(), published.end(),
                  [](const auto& a, const auto& b) { return a->key < b->key; });

        for (std::uint32_t id = 0; id < published.size(); ++id) {
            const auto& r = *published[id];
            const auto dc = r.envelope.payload->dc_view();
            IndexedDoc doc;
            doc.key = r.key.str();
            doc.source_id = r.envelope.source_id;
            doc.datestamp = r.envelope.datestamp;
            doc.title = dc.first(metadata::DcElement::Title);
            doc.snippet = text::ellipsize(dc.first(metadata::DcElement::Description), 200);
            doc.link = metadata::resource_url(*r.envelope.payload).value_or("");
            idx.docs_.push_back(std::move(doc));

            std::map<std::string, std::vector<std::uint32_t>> positions;
            std::uint32_t base = 0;
            for (auto e : {metadata::DcElement::Title, metadata::DcElement::Description, metadata::DcElement::Subject}) {
                for (const auto& value : dc.values(e)) {
                    const auto raw = raw_tokens(value);
                    for (std::uint32_t i = 0; i < raw.size(); ++i)
                        if (!idx.stopwords_.contains(raw[i]))
                            positions[raw[i]].push_back(base + i);
                    base += static_cast<std::uint32_t>(raw.size()) + kValueGap;
                }
            }
            for (auto& [term, pos] : positions)
                idx.postings_[term].push_back({id, std::move(pos)});

            for (const auto& assignment : r.facets) {
                if (assignment.facet == FacetId::Age)
                    continue;
                const auto& scheme = vocab.scheme(assignment.facet);
                for (const auto& term : assignment.terms)
                    if (scheme.contains(term))
                        idx.facets_[facet_index(assignment.facet)][term].push_back(id);
            }
            idx.facets_[facet_index(FacetId::Age)][vocabulary::age_bucket(r.envelope.datestamp, options.reference)]
                .push_back(id);
        }
        idx.finish();
        return idx;
    }
};

PostingsIndex build_index(const std::vector<store::RecordPtr>& snapshot, const BuildOptions& options)
{
    return IndexBuilder::build(snapshot, options);
}

PostingsIndex build_index(const store::RecordStore& store, const BuildOptions& options)
{
    store::ListFilter filter;
    filter.lifecycle = store::Lifecycle::Published;
    return IndexBuilder::build(store.list_all(filter), options);
}

// ---------------------------------------------------------------------------

std::string_view to_string(QueryMode m) noexcept
{
    switch (m) {
    case QueryMode::AllWords: return "ALL_WORDS";
    case QueryMode::AnyWord: return "ANY_WORD";
    case QueryMode::ExactPhrase: return "EXACT_PHRASE";
    }
    return "ALL_WORDS";
}

std::optional<QueryMode> parse_query_mode(std::string_view s) noexcept
{
    const auto l = text::to_lower_ascii(s);
    if (l == "all" || l == "all_words")
        return QueryMode::AllWords;
    if (l == "any" || l == "any_word")
        return QueryMode::AnyWord;
    if (l == "phrase" || l == "exact_phrase")
        return QueryMode::ExactPhrase;
    return std::nullopt;
}

namespace {

bool phrase_at(const std::vector<const Posting*>& parts, const std::vector<std::uint32_t>& offsets)
{
    for (auto start : parts[0]->positions) {
        bool ok = true;
        for (std::size_t i = 1; i < parts.size() && ok; ++i) {
            const auto& pos = parts[i]->positions;
            ok = std::binary_search(pos.begin(), pos.end(), start + offsets[i]);
        }
        if (ok)
            return true;
    }
    return false;
}

const Posting* find_posting(const std::vector<Posting>& list, std::uint32_t doc)
{
    auto it = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    return it != list.end() && it->doc == doc ? &*it : nullptr;
}

/// Union within a facet, intersection across facets. Null when unconstrained.
std::optional<std::vector<bool>> facet_filter(const PostingsIndex& index, const SearchQuery& q)
{
    std::optional<std::vector<bool>> allowed;
    for (const auto& [facet, selected] : q.facets) {
        if (selected.empty())
            continue;
        std::vector<bool> in_facet(index.doc_count(), false);
        for (const auto& wanted : selected) {
            const auto folded = text::fold(wanted);
            for (const auto& term : index.facet_terms(facet)) {
                if (text::fold(term) != folded)
                    continue;
                for (auto d : index.facet_docs(facet, term))
                    in_facet[d] = true;
            }
        }
        if (!allowed)
            allowed = std::move(in_facet);
        else
            for (std::size_t i = 0; i < allowed->size(); ++i)
                (*allowed)[i] = (*allowed)[i] && in_facet[i];
    }
    return allowed;
}

struct Ranked {
    std::vector<std::pair<std::uint32_t, double>> docs;
};

Ranked rank(const PostingsIndex& index, const SearchQuery& q)
{
    const auto tokens = tokenize(q.text, index.stopwords());
    const auto filter = facet_filter(index, q);
    if (tokens.empty() && !filter)
        throw Error(Errc::EmptyQuery, "query has no searchable words and no facet selection");

    Ranked out;
    const auto n = index.doc_count();
    if (tokens.empty()) {
        for (std::uint32_t d = 0; d < n; ++d)
            if ((*filter)[d])
                out.docs.push_back({d, 0.0});
        std::sort(out.docs.begin(), out.docs.end(), [&](const auto& a, const auto& b) {
            const auto& da = index.docs()[a.first];
            const auto& db = index.docs()[b.first];
            if (da.datestamp != db.datestamp)
                return da.datestamp > db.datestamp;
            return a.first < b.first;
        });
        return out;
    }

    std::map<std::string, std::uint64_t> query_tf;
    for (const auto& t : tokens)
        ++query_tf[t.term];

    std::vector<bool> candidate(n, false);
    switch (q.mode) {
    case QueryMode::AnyWord:
        for (const auto& [term, tf] : query_tf)
            if (const auto* list = index.postings(term))
                for (const auto& p : *list)
                    candidate[p.doc] = true;
        break;
    case QueryMode::AllWords: {
        std::vector<int> hits(n, 0);
        bool possible = true;
        for (const auto& [term, tf] : query_tf) {
            const auto* list = index.postings(term);
            if (!list) {
                possible = false;
                break;
            }
            for (const auto& p : *list)
                ++hits[p.doc];
        }
        if (possible)
            for (std::size_t d = 0; d < n; ++d)
                candidate[d] = hits[d] == static_cast<int>(query_tf.size());
        break;
    }
    case QueryMode::ExactPhrase: {
        std::vector<const std::vector<Posting>*> lists;
        std::vector<std::uint32_t> offsets;
        for (const auto& t : tokens) {
            const auto* list = index.postings(t.term);
            if (!list) {
                lists.clear();
                break;
            }
            lists.push_back(list);
            offsets.push_back(t.position - tokens.front().position);
        }
        if (lists.empty())
            break;
        for (const auto& first : *lists[0]) {
            std::vector<const Posting*> parts{&first};
            for (std::size_t i = 1; i < lists.size(); ++i) {
                const auto* p = find_posting(*lists[i], first.doc);
                if (!p)
                    break;
                parts.push_back(p);
            }
            if (parts.size() == lists.size() && phrase_at(parts, offsets))
                candidate[first.doc] = true;
        }
        break;
    }
    }
    if (filter)
        for (std::size_t d = 0; d < n; ++d)
            candidate[d] = candidate[d] && (*filter)[d];

    std::vector<double> dot(n, 0.0);
    double query_norm2 = 0;
    for (const auto& [term, tf] : query_tf) {
        const auto* list = index.postings(term);
        if (!list)
            continue;
        const double wq = tfidf(tf, list->size(), n);
        query_norm2 += wq * wq;
        if (wq == 0)
            continue;
        for (const auto& p : *list)
            if (candidate[p.doc])
                dot[p.doc] += wq * tfidf(p.tf(), list->size(), n);
    }
    const double query_norm = std::sqrt(query_norm2);
    for (std::uint32_t d = 0; d < n; ++d) {
        if (!candidate[d])
            continue;
        double score = 0;
        if (query_norm > 0 && index.norm(d) > 0)
            score = std::clamp(dot[d] / (query_norm * index.norm(d)), 0.0, 1.0);
        out.docs.push_back({d, score});
    }
    std::sort(out.docs.begin(), out.docs.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

SearchHit make_hit(const PostingsIndex& index, std::uint32_t d, double score)
{
    const auto& doc = index.docs()[d];
    return {doc.key, score, doc.title, doc.snippet, doc.source_id, doc.datestamp, doc.link};
}

void check_paging(const SearchQuery& q)
{
    if (q.page < 1)
        throw Error(Errc::BadPage, "page must be at least 1");
    if (q.page_size < 1 || q.page_size > kMaxPageSize)
        throw Error(Errc::BadPage, "pageSize must be between 1 and 100");
}

} // namespace

std::vector<SearchHit> search_all(const PostingsIndex& index, const SearchQuery& query)
{
    std::vector<SearchHit> out;
    for (const auto& [d, score] : rank(index, query).docs)
        out.push_back(make_hit(index, d, score));
    return out;
}

SearchResult search(const PostingsIndex& index, const SearchQuery& query)
{
    check_paging(query);
    const auto ranked = rank(index, query);
    SearchResult result;
    result.total_hits = ranked.docs.size();
    const auto begin = std::min(ranked.docs.size(), (query.page - 1) * query.page_size);
    const auto end = std::min(ranked.docs.size(), begin + query.page_size);
    for (auto i = begin; i < end; ++i)
        result.hits.push_back(make_hit(index, ranked.docs[i].first, ranked.docs[i].second));

    std::vector<bool> matched(index.doc_count(), false);
    for (const auto& [d, score] : ranked.docs)
        matched[d] = true;
    for (auto f : vocabulary::all_facets()) {
        auto& counts = result.facet_counts[f];
        for (const auto& term : index.facet_terms(f)) {
            std::size_t c = 0;
            for (auto d : index.facet_docs(f, term))
                c += matched[d] ? 1 : 0;
            counts.push_back({term, c});
        }
    }
    return result;
}

std::shared_ptr<const PostingsIndex> IndexHandle::get() const
{
    std::lock_guard lock(mutex_);
    return current_;
}

void IndexHandle::set(std::shared_ptr<const PostingsIndex> index)
{
    std::lock_guard lock(mutex_);
    current_ = std::move(index);
}

std::filesystem::path index_path(const std::filesystem::path& store_dir) { return store_dir / "index.json"; }

} // namespace fedlibre::indexer
