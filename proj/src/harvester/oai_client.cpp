#include "fedlibre/harvester/oai_client.hpp"

#include "fedlibre/metadata/namespaces.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/text.hpp"
#include "fedlibre/util/xml.hpp"

#include <thread>

namespace fedlibre::harvester {

namespace {

using metadata::SchemaTag;

struct Response {
    std::string document;
    xml::Element root;
    const xml::Element* verb = nullptr;
};

Response parse_response(std::string body, std::string_view verb)
{
    Response r;
    r.document = std::move(body);
    try {
        r.root = xml::parse(r.document);
    } catch (const Error& e) {
        throw Error(Errc::ProtocolError, std::string("response is not well-formed XML: ") + e.what());
    }
    if (!r.root.is(ns::kOaiPmh, "OAI-PMH"))
        throw Error(Errc::ProtocolError, "response root is not an OAI-PMH element");
    if (const auto* err = r.root.child(ns::kOaiPmh, "error")) {
        const auto* code = err->attribute("", "code");
        throw OaiError(code ? *code : std::string("unknown"), err->trimmed_text());
    }
    r.verb = r.root.child(ns::kOaiPmh, verb);
    if (!r.verb)
        throw Error(Errc::ProtocolError, "response has no " + std::string(verb) + " element");
    return r;
}

std::string text_of(const xml::Element& parent, std::string_view name)
{
    const auto* e = parent.child(ns::kOaiPmh, name);
    return e ? e->trimmed_text() : std::string();
}

std::string query(std::initializer_list<std::pair<std::string_view, std::string>> args)
{
    std::string out;
    for (const auto& [k, v] : args) {
        if (v.empty())
            continue;
        if (!out.empty())
            out += '&';
        out += std::string(k) + '=' + text::url_encode(v);
    }
    return out;
}

SchemaTag checked_prefix(std::string_view prefix)
{
    const auto tag = metadata::schema_from_prefix(prefix);
    if (!tag)
        throw Error(Errc::BadArgument, "unsupported metadataPrefix '" + std::string(prefix) + "' (expected oai_dc or lom)");
    return *tag;
}

RecordHeader parse_header(const xml::Element& header)
{
    RecordHeader h;
    h.identifier = text_of(header, "identifier");
    if (h.identifier.empty())
        throw Error(Errc::InvalidRecord, "record header without identifier");
    const auto ds = text_of(header, "datestamp");
    const auto parsed = parse_utc(ds);
    if (!parsed)
        throw Error(Errc::InvalidRecord, "record " + h.identifier + ": bad datestamp '" + ds + "'");
    h.datestamp = *parsed;
    for (const auto* s : header.children_named(ns::kOaiPmh, "setSpec"))
        h.set_specs.push_back(s->trimmed_text());
    const auto* status = header.attribute("", "status");
    h.deleted = status && *status == "deleted";
    return h;
}

std::vector<xml::NamespaceDecl> concat(std::vector<xml::NamespaceDecl> a, const std::vector<xml::NamespaceDecl>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

RecordEnvelope parse_record(const Response& r, const xml::Element& record, SchemaTag tag, const std::string& source_id,
                            std::string* identifier_out)
{
    const auto* header = record.child(ns::kOaiPmh, "header");
    if (!header)
        throw Error(Errc::InvalidRecord, "record without header");
    auto h = parse_header(*header);
    *identifier_out = h.identifier;
    RecordEnvelope e;
    e.source_id = source_id;
    e.oai_identifier = h.identifier;
    e.datestamp = h.datestamp;
    e.set_specs = std::move(h.set_specs);
    e.deleted = h.deleted;
    if (!e.deleted) {
        const auto* md = record.child(ns::kOaiPmh, "metadata");
        const auto* content = md ? md->first_element_child() : nullptr;
        if (!content)
            throw Error(Errc::InvalidRecord, "record " + e.oai_identifier + " has no metadata");
        auto decls = concat(concat(concat(r.root.declarations, r.verb->declarations), record.declarations),
                            md->declarations);
        e.payload = metadata::MetadataPayload::parse(tag, xml::extract(r.document, *content, decls));
    }
    return e;
}

std::string resumption_token(const Response& r)
{
    const auto* t = r.verb->child(ns::kOaiPmh, "resumptionToken");
    return t ? t->trimmed_text() : std::string();
}

} // namespace

std::string_view to_string(DeletedRecordPolicy p) noexcept
{
    switch (p) {
    case DeletedRecordPolicy::No: return "no";
    case DeletedRecordPolicy::Transient: return "transient";
    case DeletedRecordPolicy::Persistent: return "persistent";
    }
    return "no";
}

OaiClient::OaiClient(std::string base_url, HttpTransport& transport, ClientOptions options)
    : base_url_(std::move(base_url)), transport_(transport), options_(std::move(options))
{
}

void OaiClient::pace()
{
    const auto now = std::chrono::steady_clock::now();
    if (last_request_ && options_.politeness.count() > 0) {
        const auto next = *last_request_ + options_.politeness;
        if (next > now)
            std::this_thread::sleep_until(next);
    }
    last_request_ = std::chrono::steady_clock::now();
}

std::string OaiClient::fetch(const std::string& q)
{
    const auto url = base_url_ + (base_url_.find('?') == std::string::npos ? '?' : '&') + q;
    for (int attempt = 0;; ++attempt) {
        pace();
        ++requests_;
        try {
            auto res = transport_.get(url);
            if (res.status == 200)
                return std::move(res.body);
            // Some repositories send protocol errors with a 4xx status.
            if (res.status < 500 && res.body.find("OAI-PMH") != std::string::npos)
                return std::move(res.body);
            if (res.status >= 500)
                throw Error(Errc::Transport, "HTTP " + std::to_string(res.status) + " from " + base_url_);
            throw Error(Errc::ProtocolError, "HTTP " + std::to_string(res.status) + " from " + base_url_);
        } catch (const Error& e) {
            if (e.code() != Errc::Transport || attempt >= options_.retries)
                throw;
            std::this_thread::sleep_for(options_.backoff * (1 << attempt));
        }
    }
}

RepositoryIdentity OaiClient::identify()
{
    const auto r = parse_response(fetch("verb=Identify"), "Identify");
    RepositoryIdentity id;
    id.repository_name = text_of(*r.verb, "repositoryName");
    id.base_url = text_of(*r.verb, "baseURL");
    id.protocol_version = text_of(*r.verb, "protocolVersion");
    if (id.protocol_version != "2.0")
        throw Error(Errc::UnsupportedVersion, "repository speaks OAI-PMH '" + id.protocol_version + "', expected 2.0");
    id.earliest_datestamp = parse_utc(text_of(*r.verb, "earliestDatestamp"));
    const auto policy = text_of(*r.verb, "deletedRecord");
    if (policy == "persistent")
        id.deleted_record = DeletedRecordPolicy::Persistent;
    else if (policy == "transient")
        id.deleted_record = DeletedRecordPolicy::Transient;
    const auto gran = text_of(*r.verb, "granularity");
    if (gran == "YYYY-MM-DDThh:mm:ssZ")
        id.granularity = Granularity::Second;
    else if (gran == "YYYY-MM-DD")
        id.granularity = Granularity::Day;
    else
        throw Error(Errc::ProtocolError, "unknown granularity '" + gran + "'");
    for (const auto* e : r.verb->children_named(ns::kOaiPmh, "adminEmail"))
        id.admin_emails.push_back(e->trimmed_text());
    return id;
}

std::vector<MetadataFormat> OaiClient::list_metadata_formats(const std::optional<std::string>& identifier)
{
    const auto r = parse_response(
        fetch(query({{"verb", "ListMetadataFormats"}, {"identifier", identifier.value_or("")}})),
        "ListMetadataFormats");
    std::vector<MetadataFormat> out;
    for (const auto* f : r.verb->children_named(ns::kOaiPmh, "metadataFormat"))
        out.push_back({text_of(*f, "metadataPrefix"), text_of(*f, "schema"), text_of(*f, "metadataNamespace")});
    return out;
}

std::vector<SetInfo> OaiClient::list_sets()
{
    std::vector<SetInfo> out;
    std::string token;
    do {
        const auto q = token.empty() ? std::string("verb=ListSets") : query({{"verb", "ListSets"}, {"resumptionToken", token}});
        const auto r = parse_response(fetch(q), "ListSets");
        for (const auto* s : r.verb->children_named(ns::kOaiPmh, "set"))
            out.push_back({text_of(*s, "setSpec"), text_of(*s, "setName")});
        token = resumption_token(r);
    } while (!token.empty());
    return out;
}

namespace {

/// Drives a paged listing verb; `page` consumes one parsed response.
template <typename PageFn>
void paged(std::string_view verb, std::string_view prefix, const HarvestWindow& w,
           const std::function<std::string(const std::string&)>& fetch, PageFn&& page)
{
    const auto first = query({{"verb", std::string(verb)},
                              {"metadataPrefix", std::string(prefix)},
                              {"from", w.from ? format_utc(*w.from, w.granularity) : ""},
                              {"until", w.until ? format_utc(*w.until, w.granularity) : ""},
                              {"set", w.set.value_or("")}});
    bool restarted = false;
    for (;;) {
        std::string token;
        try {
            std::string q = first;
            for (;;) {
                const auto r = parse_response(fetch(q), verb);
                page(r);
                token = resumption_token(r);
                if (token.empty())
                    return;
                q = query({{"verb", std::string(verb)}, {"resumptionToken", token}});
            }
        } catch (const OaiError& e) {
            if (e.oai_code() == "noRecordsMatch" && token.empty())
                return;
            if (e.oai_code() == "badResumptionToken" && !token.empty() && !restarted) {
                restarted = true;
                continue;
            }
            throw;
        }
    }
}

} // namespace

void OaiClient::list_identifiers(std::string_view metadata_prefix, const HarvestWindow& window, const HeaderSink& sink)
{
    checked_prefix(metadata_prefix);
    paged("ListIdentifiers", metadata_prefix, window, [this](const std::string& q) { return fetch(q); },
          [&](const Response& r) {
              for (const auto* h : r.verb->children_named(ns::kOaiPmh, "header"))
                  sink(parse_header(*h));
          });
}

void OaiClient::list_records(std::string_view metadata_prefix, const HarvestWindow& window, const RecordSink& sink,
                             const RecordErrorSink& on_error)
{
    const auto tag = checked_prefix(metadata_prefix);
    paged("ListRecords", metadata_prefix, window, [this](const std::string& q) { return fetch(q); },
          [&](const Response& r) {
              for (const auto* rec : r.verb->children_named(ns::kOaiPmh, "record")) {
                  std::string identifier;
                  std::optional<RecordEnvelope> env;
                  try {
                      env = parse_record(r, *rec, tag, options_.source_id, &identifier);
                      env->validate();
                  } catch (const Error& e) {
                      if (!on_error)
                          throw;
                      on_error(identifier, e);
                      continue;
                  }
                  sink(std::move(*env));
              }
          });
}

std::vector<RecordEnvelope> OaiClient::list_records(std::string_view metadata_prefix, const HarvestWindow& window)
{
    std::vector<RecordEnvelope> out;
    list_records(metadata_prefix, window, [&](RecordEnvelope&& e) { out.push_back(std::move(e)); });
    return out;
}

RecordEnvelope OaiClient::get_record(const std::string& identifier, std::string_view metadata_prefix)
{
    const auto tag = checked_prefix(metadata_prefix);
    if (identifier.empty())
        throw Error(Errc::BadArgument, "identifier must not be empty");
    const auto r = parse_response(fetch(query({{"verb", "GetRecord"},
                                               {"identifier", identifier},
                                               {"metadataPrefix", std::string(metadata_prefix)}})),
                                  "GetRecord");
    const auto* rec = r.verb->child(ns::kOaiPmh, "record");
    if (!rec)
        throw Error(Errc::ProtocolError, "GetRecord response without record");
    std::string id;
    auto env = parse_record(r, *rec, tag, options_.source_id, &id);
    env.validate();
    return env;
}

} // namespace fedlibre::harvester
