#include "fedlibre/gateway/api.hpp"

#include "fedlibre/gateway/export.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"
#include "fedlibre/util/text.hpp"
#include "fedlibre/util/xml.hpp"

#include <algorithm>
#include <charconv>

namespace fedlibre::gateway {

using json = nlohmann::json;
using vocabulary::FacetId;

std::string_view to_string(Lang l) noexcept
{
    return l == Lang::En ? "en" : "fr";
}

std::optional<Lang> parse_lang(std::string_view s) noexcept
{
    const auto lower = text::to_lower_ascii(s);
    if (lower == "fr")
        return Lang::Fr;
    if (lower == "en")
        return Lang::En;
    return std::nullopt;
}

Labels Labels::load(const std::optional<std::filesystem::path>& dir)
{
    json doc;
    try {
        doc = json::parse(load_resource(dir, "labels.json"));
    } catch (const json::exception& e) {
        throw Error(Errc::Config, std::string("labels.json: ") + e.what());
    }
    Labels out;
    const auto facets = doc.value("facets", json::object());
    for (const auto& [name, langs] : facets.items()) {
        const auto id = vocabulary::parse_facet_id(name);
        if (!id || !langs.is_object())
            throw Error(Errc::Config, "labels.json: unknown facet '" + name + "'");
        out.facets_[*id][Lang::Fr] = langs.value("fr", name);
        out.facets_[*id][Lang::En] = langs.value("en", name);
    }
    const auto terms = doc.value("terms", json::object());
    const auto english = terms.value("en", json::object());
    for (const auto& [term, label] : english.items()) {
        if (!label.is_string())
            throw Error(Errc::Config, "labels.json: label of '" + term + "' is not a string");
        out.english_[term] = label.get<std::string>();
    }
    return out;
}

const Labels& Labels::builtin()
{
    static const Labels labels = load();
    return labels;
}

std::string Labels::facet(FacetId id, Lang lang) const
{
    const auto it = facets_.find(id);
    if (it == facets_.end())
        return std::string(vocabulary::to_string(id));
    return it->second.at(lang);
}

std::string Labels::term(const std::string& canonical, Lang lang) const
{
    if (lang == Lang::En) {
        const auto it = english_.find(canonical);
        if (it != english_.end())
            return it->second;
    }
    return canonical;
}

std::pair<FacetId, std::string> parse_facet_token(std::string_view token)
{
    const auto eq = token.find('=');
    if (eq == std::string_view::npos)
        throw Error(Errc::BadArgument, "facet '" + std::string(token) + "' is not of the form FACET=term");
    const auto id = vocabulary::parse_facet_id(text::trim(token.substr(0, eq)));
    if (!id)
        throw Error(Errc::BadArgument, "unknown facet '" + std::string(token.substr(0, eq)) + "'");
    const auto term = text::trim(token.substr(eq + 1));
    if (term.empty())
        throw Error(Errc::BadArgument, "facet '" + std::string(token) + "' has an empty term");
    return {*id, std::string(term)};
}

namespace {

std::size_t parse_count(std::string_view name, std::string_view v)
{
    std::size_t n = 0;
    const auto t = text::trim(v);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw Error(Errc::BadPage, std::string(name) + " '" + std::string(v) + "' is not a non-negative integer");
    return n;
}

std::string iso(Timestamp t)
{
    return format_utc(t);
}

} // namespace

indexer::SearchQuery parse_search_params(const std::vector<std::pair<std::string, std::string>>& params)
{
    indexer::SearchQuery q;
    for (const auto& [k, v] : params) {
        if (k == "q") {
            q.text = v;
        } else if (k == "mode") {
            const auto m = indexer::parse_query_mode(v);
            if (!m)
                throw Error(Errc::BadArgument, "unknown mode '" + v + "' (all, any, phrase)");
            q.mode = *m;
        } else if (k == "facet") {
            auto [id, term] = parse_facet_token(v);
            q.facets[id].insert(std::move(term));
        } else if (k == "page") {
            q.page = parse_count("page", v);
        } else if (k == "pageSize") {
            q.page_size = parse_count("pageSize", v);
        }
    }
    return q;
}

std::string detail_url(std::string_view public_url, std::string_view key)
{
    std::string base(public_url);
    while (!base.empty() && base.back() == '/')
        base.pop_back();
    return base + "/api/records/" + text::url_encode(key);
}

json search_response(const indexer::SearchQuery& query, const indexer::SearchResult& result, Lang lang,
                     const Labels& labels, std::string_view public_url)
{
    json facets = json::object();
    for (const auto& [id, terms] : query.facets)
        facets[std::string(vocabulary::to_string(id))] = json(std::vector<std::string>(terms.begin(), terms.end()));
    json hits = json::array();
    for (const auto& h : result.hits) {
        const auto key = RecordKey::parse(h.key);
        hits.push_back({{"key", h.key},
                        {"score", h.score},
                        {"title", h.title},
                        {"snippet", h.snippet},
                        {"sourceId", h.source_id},
                        {"oaiIdentifier", std::string(key.oai_identifier())},
                        {"datestamp", iso(h.datestamp)},
                        {"links",
                         {{"detail", detail_url(public_url, h.key)},
                          {"source", h.link.empty() ? json(nullptr) : json(h.link)}}}});
    }
    json counts = json::array();
    for (auto id : vocabulary::all_facets()) {
        const auto it = result.facet_counts.find(id);
        json terms = json::array();
        if (it != result.facet_counts.end())
            for (const auto& c : it->second)
                terms.push_back({{"term", c.term}, {"label", labels.term(c.term, lang)}, {"count", c.count}});
        counts.push_back({{"facetId", std::string(vocabulary::to_string(id))},
                          {"label", labels.facet(id, lang)},
                          {"terms", std::move(terms)}});
    }
    return {{"query",
             {{"q", query.text},
              {"mode", std::string(indexer::to_string(query.mode))},
              {"facets", std::move(facets)},
              {"page", query.page},
              {"pageSize", query.page_size},
              {"lang", std::string(to_string(lang))}}},
            {"totalHits", result.total_hits},
            {"hits", std::move(hits)},
            {"facetCounts", std::move(counts)}};
}

json facets_response(const vocabulary::Vocabulary& vocabulary, Lang lang, const Labels& labels)
{
    json out = json::array();
    for (auto id : vocabulary::all_facets()) {
        json terms = json::array();
        for (const auto& t : vocabulary.scheme(id).terms)
            terms.push_back({{"term", t}, {"label", labels.term(t, lang)}});
        out.push_back({{"facetId", std::string(vocabulary::to_string(id))},
                       {"label", labels.facet(id, lang)},
                       {"terms", std::move(terms)}});
    }
    return {{"lang", std::string(to_string(lang))}, {"facets", std::move(out)}};
}

json dc_to_json(const metadata::DublinCoreRecord& dc)
{
    json out = json::object();
    for (auto e : metadata::all_dc_elements()) {
        if (dc[e].empty())
            continue;
        json values = json::array();
        for (const auto& v : dc[e]) {
            json item{{"value", v.value}};
            if (!v.language.empty())
                item["lang"] = v.language;
            values.push_back(std::move(item));
        }
        out[std::string(metadata::element_name(e))] = std::move(values);
    }
    return out;
}

namespace {

json lang_strings(const std::vector<metadata::LangString>& v)
{
    json out = json::array();
    for (const auto& s : v) {
        json item{{"value", s.value}};
        if (!s.language.empty())
            item["lang"] = s.language;
        out.push_back(std::move(item));
    }
    return out;
}

template <typename T>
json optional_value(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace

json lom_to_json(const metadata::LomRecord& lom)
{
    using metadata::LomCategory;
    json out = json::object();
    if (lom.has(LomCategory::General)) {
        json ids = json::array();
        for (const auto& i : lom.general.identifier)
            ids.push_back({{"catalog", i.catalog}, {"entry", i.entry}});
        out["general"] = {{"identifier", std::move(ids)},
                          {"title", lang_strings(lom.general.title)},
                          {"language", lom.general.language},
                          {"description", lang_strings(lom.general.description)},
                          {"keyword", lang_strings(lom.general.keyword)}};
    }
    if (lom.has(LomCategory::LifeCycle)) {
        json contribute = json::array();
        for (const auto& c : lom.life_cycle.contribute)
            contribute.push_back({{"role", c.role},
                                  {"entity", metadata::entity_display_name(c.entity)},
                                  {"date", c.date}});
        out["lifeCycle"] = {{"version", lang_strings(lom.life_cycle.version)}, {"contribute", std::move(contribute)}};
    }
    if (lom.has(LomCategory::MetaMetadata))
        out["metaMetadata"] = {{"schema", optional_value(lom.meta_metadata.schema)}};
    if (lom.has(LomCategory::Technical))
        out["technical"] = {{"format", lom.technical.format},
                            {"size", optional_value(lom.technical.size_bytes)},
                            {"location", lom.technical.location},
                            {"durationSeconds", optional_value(lom.technical.duration_seconds)}};
    if (lom.has(LomCategory::Educational))
        out["educational"] = {{"learningResourceType", lom.educational.resource_type},
                              {"intendedEndUserRole", lom.educational.intended_end_user_role},
                              {"context", lom.educational.context},
                              {"typicalAgeRange", optional_value(lom.educational.typical_age_range)},
                              {"typicalLearningTimeSeconds",
                               optional_value(lom.educational.typical_learning_time_seconds)},
                              {"language", lom.educational.language}};
    if (lom.has(LomCategory::Relation)) {
        json rel = json::array();
        for (const auto& r : lom.relation)
            rel.push_back({{"kind", r.kind}, {"target", r.target}});
        out["relation"] = std::move(rel);
    }
    if (lom.has(LomCategory::Rights))
        out["rights"] = {{"cost", optional_value(lom.rights.cost)},
                         {"copyright", optional_value(lom.rights.copyright)},
                         {"description", lang_strings(lom.rights.description)}};
    if (lom.has(LomCategory::Annotation)) {
        json ann = json::array();
        for (const auto& a : lom.annotation)
            ann.push_back({{"entity", metadata::entity_display_name(a.entity)},
                           {"date", a.date},
                           {"description", lang_strings({a.description})}});
        out["annotation"] = std::move(ann);
    }
    if (lom.has(LomCategory::Classification)) {
        json cls = json::array();
        for (const auto& c : lom.classification) {
            json paths = json::array();
            for (const auto& p : c.taxon_paths) {
                json taxa = json::array();
                for (const auto& t : p.taxa)
                    taxa.push_back({{"id", t.id}, {"entry", t.entry}});
                paths.push_back({{"source", p.source}, {"taxa", std::move(taxa)}});
            }
            cls.push_back({{"purpose", c.purpose}, {"taxonPaths", std::move(paths)}});
        }
        out["classification"] = std::move(cls);
    }
    return out;
}

json record_detail(const store::StoredRecord& r, const std::optional<store::SourceDescriptor>& source, Lang lang,
                   const Labels& labels, std::string_view public_url)
{
    const auto key = r.key.str();
    json out{{"key", key},
             {"sourceId", std::string(r.key.source_id())},
             {"oaiIdentifier", std::string(r.key.oai_identifier())},
             {"datestamp", iso(r.envelope.datestamp)},
             {"setSpecs", r.envelope.set_specs},
             {"deleted", r.envelope.deleted},
             {"lifecycle", std::string(store::to_string(r.lifecycle))},
             {"firstSeen", iso(r.first_seen)},
             {"lastUpdated", iso(r.last_updated)},
             {"lang", std::string(to_string(lang))}};
    if (r.envelope.payload) {
        const auto& p = *r.envelope.payload;
        out["schema"] = std::string(metadata::metadata_prefix(p.schema()));
        out["dc"] = dc_to_json(p.dc_view());
        if (const auto* lom = p.lom())
            out["lom"] = lom_to_json(*lom);
        const auto link = metadata::resource_url(p);
        out["link"] = link ? json(*link) : json(nullptr);
    }
    json facets = json::array();
    for (const auto& f : r.facets) {
        json terms = json::array();
        for (const auto& t : f.terms)
            terms.push_back({{"term", t}, {"label", labels.term(t, lang)}});
        facets.push_back({{"facetId", std::string(vocabulary::to_string(f.facet))},
                          {"label", labels.facet(f.facet, lang)},
                          {"terms", std::move(terms)}});
    }
    out["facets"] = std::move(facets);
    out["source"] = source ? json(*source) : json(nullptr);
    std::string base(public_url);
    while (!base.empty() && base.back() == '/')
        base.pop_back();
    json exports = json::object();
    for (auto f : {ExportFormat::DcXml, ExportFormat::LomXml, ExportFormat::Csv, ExportFormat::Bibtex}) {
        if (f == ExportFormat::LomXml && !(r.envelope.payload && r.envelope.payload->is_lom()))
            continue;
        exports[std::string(to_string(f))] =
            base + "/api/export?format=" + std::string(to_string(f)) + "&key=" + text::url_encode(key);
    }
    out["exportLinks"] = std::move(exports);
    return out;
}

json error_body(std::string_view code, std::string_view message)
{
    return {{"error", {{"code", std::string(code)}, {"message", std::string(message)}}}};
}

std::string rss_feed(const std::vector<store::RecordPtr>& records, const FeedOptions& options)
{
    std::vector<store::RecordPtr> published;
    for (const auto& r : records)
        if (r && r->searchable() && r->envelope.payload)
            published.push_back(r);
    std::sort(published.begin(), published.end(), [](const auto& a, const auto& b) {
        if (a->envelope.datestamp != b->envelope.datestamp)
            return a->envelope.datestamp > b->envelope.datestamp;
        return a->key < b->key;
    });
    if (published.size() > options.limit)
        published.resize(options.limit);

    std::string base = options.public_url;
    while (!base.empty() && base.back() == '/')
        base.pop_back();
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rss version=\"2.0\"><channel><title>" +
                      xml::escape_text(options.title) + "</title><link>" + xml::escape_text(base + "/") +
                      "</link><description>" + xml::escape_text("Recently updated records of " + options.title) +
                      "</description>";
    if (!published.empty())
        out += "<lastBuildDate>" + format_rfc822(published.front()->envelope.datestamp) + "</lastBuildDate>";
    for (const auto& r : published) {
        const auto& p = *r->envelope.payload;
        const auto dc = p.dc_view();
        const auto key = r->key.str();
        const auto link = metadata::resource_url(p).value_or(detail_url(base, key));
        auto title = dc.first(metadata::DcElement::Title);
        if (title.empty())
            title = std::string(r->key.oai_identifier());
        out += "<item><title>" + xml::escape_text(title) + "</title><link>" + xml::escape_text(link) + "</link>";
        const auto description = dc.first(metadata::DcElement::Description);
        if (!description.empty())
            out += "<description>" + xml::escape_text(text::ellipsize(description, 200)) + "</description>";
        out += "<guid isPermaLink=\"false\">" + xml::escape_text(key) + "</guid><pubDate>" +
               format_rfc822(r->envelope.datestamp) + "</pubDate></item>";
    }
    return out + "</channel></rss>\n";
}

} // namespace fedlibre::gateway
