#include "fedlibre/gateway/oai_server.hpp"

#include "fedlibre/gateway/export.hpp"
#include "fedlibre/metadata/namespaces.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"
#include "fedlibre/util/text.hpp"
#include "fedlibre/util/xml.hpp"

#include <json.hpp>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace fedlibre::gateway {

namespace {

using json = nlohmann::json;
using metadata::SchemaTag;

struct ProtocolFault {
    std::string code;
    std::string message;
};

[[noreturn]] void fault(std::string code, std::string message)
{
    throw ProtocolFault{std::move(code), std::move(message)};
}

std::string hex(const unsigned char* data, std::size_t n)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out += digits[data[i] >> 4];
        out += digits[data[i] & 0xf];
    }
    return out;
}

std::string hmac_hex(const std::string& secret, std::string_view message)
{
    unsigned char mac[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()),
         reinterpret_cast<const unsigned char*>(message.data()), message.size(), mac, &len);
    return hex(mac, len);
}

std::string base64url_encode(std::string_view in)
{
    std::string out(4 * ((in.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(in.data()), static_cast<int>(in.size()));
    out.resize(static_cast<std::size_t>(n));
    while (!out.empty() && out.back() == '=')
        out.pop_back();
    for (auto& c : out) {
        if (c == '+')
            c = '-';
        else if (c == '/')
            c = '_';
    }
    return out;
}

std::optional<std::string> base64url_decode(std::string_view in)
{
    std::string s(in);
    for (auto& c : s) {
        if (c == '-')
            c = '+';
        else if (c == '_')
            c = '/';
        else if (!std::isalnum(static_cast<unsigned char>(c)))
            return std::nullopt;
    }
    if (s.size() % 4 == 1)
        return std::nullopt;
    std::size_t pad = 0;
    while (s.size() % 4) {
        s += '=';
        ++pad;
    }
    std::string out(s.size() / 4 * 3, '\0');
    const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(s.data()), static_cast<int>(s.size()));
    if (n < 0)
        return std::nullopt;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

/// Arguments of a list request, either from the query or from a token.
struct ListArgs {
    std::string verb;
    std::string prefix;
    std::string from;
    std::string until;
    std::string set;
    std::size_t offset = 0;
};

std::string query_hash(const ListArgs& a)
{
    const auto q = a.verb + '\n' + a.prefix + '\n' + a.from + '\n' + a.until + '\n' + a.set;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(q.data(), q.size(), md, &len, EVP_sha256(), nullptr);
    return hex(md, 8);
}

std::string granularity_name(Granularity g)
{
    return g == Granularity::Day ? "YYYY-MM-DD" : "YYYY-MM-DDThh:mm:ssZ";
}

const std::map<std::string, std::set<std::string>>& verb_arguments()
{
    static const std::map<std::string, std::set<std::string>> table{
        {"Identify", {}},
        {"ListMetadataFormats", {"identifier"}},
        {"ListSets", {"resumptionToken"}},
        {"ListIdentifiers", {"metadataPrefix", "from", "until", "set", "resumptionToken"}},
        {"ListRecords", {"metadataPrefix", "from", "until", "set", "resumptionToken"}},
        {"GetRecord", {"identifier", "metadataPrefix"}},
    };
    return table;
}

/// Exposed records in (datestamp, key) order, one per identifier.
std::vector<store::RecordPtr> exposed_records(const store::RecordStore& store)
{
    auto all = store.list_all();
    std::map<std::string_view, const store::StoredRecord*> winner;
    for (const auto& r : all) {
        if (!r->exposed())
            continue;
        auto [it, inserted] = winner.emplace(r->key.oai_identifier(), r.get());
        if (!inserted && r->key < it->second->key)
            it->second = r.get();
    }
    std::vector<store::RecordPtr> out;
    for (const auto& r : all) {
        const auto it = winner.find(r->key.oai_identifier());
        if (it != winner.end() && it->second == r.get())
            out.push_back(r);
    }
    return out;
}

bool deleted(const store::StoredRecord& r)
{
    return r.lifecycle == store::Lifecycle::Withdrawn || r.envelope.deleted || !r.envelope.payload;
}

bool disseminates(const store::StoredRecord& r, SchemaTag tag)
{
    return tag == SchemaTag::OaiDc || deleted(r) || r.envelope.payload->is_lom();
}

std::string header_xml(const store::StoredRecord& r)
{
    std::string out = deleted(r) ? "<header status=\"deleted\">" : "<header>";
    out += "<identifier>" + xml::escape_text(r.key.oai_identifier()) + "</identifier>";
    out += "<datestamp>" + format_utc(r.envelope.datestamp) + "</datestamp>";
    out += "<setSpec>" + xml::escape_text(r.key.source_id()) + "</setSpec>";
    return out + "</header>";
}

std::string record_xml(const store::StoredRecord& r, SchemaTag tag)
{
    std::string out = "<record>" + header_xml(r);
    if (!deleted(r)) {
        const auto& p = *r.envelope.payload;
        out += "<metadata>";
        if (tag == SchemaTag::Lom || !p.is_lom())
            out += std::string(xml::strip_prolog(p.raw_xml()));
        else
            out += serialize_dc(p.dc_view());
        out += "</metadata>";
    }
    return out + "</record>";
}

} // namespace

OaiServer::OaiServer(const store::RecordStore& store, OaiServerConfig config, std::string secret, const Clock* clock)
    : store_(store), config_(std::move(config)), secret_(std::move(secret)), clock_(clock)
{
    if (config_.page_size < 1)
        throw Error(Errc::Config, "OAI pageSize must be at least 1");
    if (secret_.empty())
        throw Error(Errc::Config, "OAI token secret must not be empty");
}

std::string OaiServer::handle(const QueryParams& params) const
{
    const Clock& clock = clock_ ? *clock_ : system_clock_;
    const auto now = clock.now();

    std::map<std::string, std::string> args;
    bool repeated = false;
    for (const auto& [k, v] : params)
        repeated |= !args.emplace(k, v).second;

    std::string request_attrs;
    std::string body;
    try {
        const auto verb_it = args.find("verb");
        if (verb_it == args.end() || !verb_arguments().contains(verb_it->second))
            fault("badVerb", verb_it == args.end() ? "missing verb" : "illegal verb '" + verb_it->second + "'");
        if (repeated) {
            if (std::count_if(params.begin(), params.end(), [](const auto& p) { return p.first == "verb"; }) > 1)
                fault("badVerb", "verb given more than once");
            fault("badArgument", "repeated argument");
        }
        const auto verb = verb_it->second;
        const auto& allowed = verb_arguments().at(verb);
        for (const auto& [k, v] : args)
            if (k != "verb" && !allowed.contains(k))
                fault("badArgument", "illegal argument '" + k + "' for " + verb);

        const auto arg = [&](const std::string& name) -> std::optional<std::string> {
            const auto it = args.find(name);
            if (it == args.end())
                return std::nullopt;
            return it->second;
        };
        const auto require = [&](const std::string& name) {
            auto v = arg(name);
            if (!v || v->empty())
                fault("badArgument", "missing required argument '" + name + "'");
            return *v;
        };
        const auto prefix_tag = [&](const std::string& prefix) {
            const auto tag = metadata::schema_from_prefix(prefix);
            if (!tag)
                fault("cannotDisseminateFormat", "metadataPrefix '" + prefix + "' is not supported");
            return *tag;
        };

        const auto records = exposed_records(store_);
        const auto find_identifier = [&](const std::string& id) -> const store::StoredRecord* {
            for (const auto& r : records)
                if (r->key.oai_identifier() == id)
                    return r.get();
            return nullptr;
        };

        for (const auto& [k, v] : args)
            request_attrs += " " + k + "=\"" + xml::escape_attribute(v) + "\"";

        if (verb == "Identify") {
            auto earliest = make_utc(1970, 1, 1);
            if (!records.empty())
                earliest = records.front()->envelope.datestamp;
            body = "<Identify><repositoryName>" + xml::escape_text(config_.repository_name) +
                   "</repositoryName><baseURL>" + xml::escape_text(config_.base_url) +
                   "</baseURL><protocolVersion>2.0</protocolVersion><adminEmail>" +
                   xml::escape_text(config_.admin_email) + "</adminEmail><earliestDatestamp>" + format_utc(earliest) +
                   "</earliestDatestamp><deletedRecord>persistent</deletedRecord><granularity>" +
                   granularity_name(Granularity::Second) + "</granularity></Identify>";
        } else if (verb == "ListMetadataFormats") {
            bool lom = false;
            if (const auto id = arg("identifier")) {
                const auto* r = find_identifier(*id);
                if (!r)
                    fault("idDoesNotExist", "no record with identifier '" + *id + "'");
                lom = !deleted(*r) && r->envelope.payload->is_lom();
            } else {
                lom = std::any_of(records.begin(), records.end(),
                                  [](const auto& r) { return !deleted(*r) && r->envelope.payload->is_lom(); });
            }
            body = "<ListMetadataFormats><metadataFormat><metadataPrefix>oai_dc</metadataPrefix><schema>" +
                   std::string(ns::kOaiDcSchema) + "</schema><metadataNamespace>" + std::string(ns::kOaiDc) +
                   "</metadataNamespace></metadataFormat>";
            if (lom)
                body += "<metadataFormat><metadataPrefix>lom</metadataPrefix><schema>" + std::string(ns::kLomSchema) +
                        "</schema><metadataNamespace>" + std::string(ns::kLom) + "</metadataNamespace></metadataFormat>";
            body += "</ListMetadataFormats>";
        } else if (verb == "ListSets") {
            if (arg("resumptionToken"))
                fault("badResumptionToken", "ListSets is never split into pages");
            std::set<std::string> sets;
            for (const auto& r : records)
                sets.emplace(r->key.source_id());
            if (sets.empty())
                fault("noSetHierarchy", "the repository has no records, hence no sets");
            body = "<ListSets>";
            for (const auto& s : sets)
                body += "<set><setSpec>" + xml::escape_text(s) + "</setSpec><setName>" + xml::escape_text(s) +
                        "</setName></set>";
            body += "</ListSets>";
        } else if (verb == "GetRecord") {
            const auto id = require("identifier");
            const auto tag = prefix_tag(require("metadataPrefix"));
            const auto* r = find_identifier(id);
            if (!r)
                fault("idDoesNotExist", "no record with identifier '" + id + "'");
            if (!disseminates(*r, tag))
                fault("cannotDisseminateFormat", "record '" + id + "' is not available as lom");
            body = "<GetRecord>" + record_xml(*r, tag) + "</GetRecord>";
        } else {
            ListArgs list;
            if (const auto token = arg("resumptionToken")) {
                if (args.size() != 2)
                    fault("badArgument", "resumptionToken is an exclusive argument");
                const auto dot = token->find('.');
                if (dot == std::string::npos)
                    fault("badResumptionToken", "malformed resumptionToken");
                const auto payload = token->substr(0, dot);
                const auto mac = token->substr(dot + 1);
                const auto expected = hmac_hex(secret_, payload);
                if (mac.size() != expected.size() || CRYPTO_memcmp(mac.data(), expected.data(), mac.size()) != 0)
                    fault("badResumptionToken", "resumptionToken signature mismatch");
                const auto decoded = base64url_decode(payload);
                json j;
                try {
                    if (!decoded)
                        throw std::runtime_error("bad encoding");
                    j = json::parse(*decoded);
                    list.verb = j.at("verb").get<std::string>();
                    list.prefix = j.at("prefix").get<std::string>();
                    list.from = j.at("from").get<std::string>();
                    list.until = j.at("until").get<std::string>();
                    list.set = j.at("set").get<std::string>();
                    list.offset = j.at("offset").get<std::size_t>();
                    if (j.at("hash").get<std::string>() != query_hash(list))
                        throw std::runtime_error("hash mismatch");
                    if (j.at("expires").get<std::int64_t>() < now.time_since_epoch().count())
                        fault("badResumptionToken", "resumptionToken has expired");
                } catch (const ProtocolFault&) {
                    throw;
                } catch (const std::exception&) {
                    fault("badResumptionToken", "malformed resumptionToken");
                }
                if (list.verb != verb)
                    fault("badResumptionToken", "resumptionToken was issued for " + list.verb);
            } else {
                list.verb = verb;
                list.prefix = require("metadataPrefix");
                list.from = arg("from").value_or("");
                list.until = arg("until").value_or("");
                list.set = arg("set").value_or("");
            }

            std::optional<Timestamp> from;
            std::optional<Timestamp> until;
            Granularity from_g = Granularity::Second;
            Granularity until_g = Granularity::Second;
            if (!list.from.empty() && !(from = parse_utc(list.from, &from_g)))
                fault("badArgument", "bad from '" + list.from + "'");
            if (!list.until.empty() && !(until = parse_utc(list.until, &until_g)))
                fault("badArgument", "bad until '" + list.until + "'");
            if (from && until && from_g != until_g)
                fault("badArgument", "from and until have different granularities");
            if (until && until_g == Granularity::Day)
                *until += std::chrono::seconds(86399);
            if (from && until && *from > *until)
                fault("badArgument", "from is later than until");
            const auto tag = prefix_tag(list.prefix);

            if (!list.set.empty() && records.empty())
                fault("noSetHierarchy", "the repository has no sets");

            std::vector<const store::StoredRecord*> matches;
            for (const auto& r : records) {
                const auto ds = r->envelope.datestamp;
                if ((from && ds < *from) || (until && ds > *until))
                    continue;
                if (!list.set.empty() && r->key.source_id() != list.set)
                    continue;
                if (!disseminates(*r, tag))
                    continue;
                matches.push_back(r.get());
            }
            if (matches.empty())
                fault("noRecordsMatch", "no records match the request");
            if (list.offset >= matches.size())
                fault("badResumptionToken", "resumptionToken points past the end of the list");

            const auto end = std::min(matches.size(), list.offset + config_.page_size);
            body = "<" + verb + ">";
            for (auto i = list.offset; i < end; ++i)
                body += verb == "ListRecords" ? record_xml(*matches[i], tag) : header_xml(*matches[i]);
            if (end < matches.size()) {
                const auto expires = now + config_.token_ttl;
                const json next{{"verb", list.verb},         {"prefix", list.prefix}, {"from", list.from},
                                {"until", list.until},       {"set", list.set},       {"offset", end},
                                {"hash", query_hash(list)},  {"expires", expires.time_since_epoch().count()}};
                const auto payload = base64url_encode(next.dump());
                body += "<resumptionToken expirationDate=\"" + format_utc(expires) + "\" completeListSize=\"" +
                        std::to_string(matches.size()) + "\" cursor=\"" + std::to_string(list.offset) + "\">" +
                        payload + "." + hmac_hex(secret_, payload) + "</resumptionToken>";
            }
            body += "</" + verb + ">";
        }
    } catch (const ProtocolFault& f) {
        if (f.code == "badVerb" || f.code == "badArgument")
            request_attrs.clear();
        body = "<error code=\"" + f.code + "\">" + xml::escape_text(f.message) + "</error>";
    }

    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<OAI-PMH xmlns=\"" + std::string(ns::kOaiPmh) +
           "\" xmlns:xsi=\"" + std::string(ns::kXsi) + "\" xsi:schemaLocation=\"" + std::string(ns::kOaiPmh) + " " +
           std::string(ns::kOaiPmhSchema) + "\"><responseDate>" + format_utc(now) + "</responseDate><request" +
           request_attrs + ">" + xml::escape_text(config_.base_url) + "</request>" + body + "</OAI-PMH>\n";
}

std::string generate_secret()
{
    unsigned char bytes[32];
    if (RAND_bytes(bytes, sizeof bytes) != 1)
        throw Error(Errc::Config, "cannot draw random bytes for the token secret");
    return hex(bytes, sizeof bytes);
}

std::string load_or_create_secret(const std::filesystem::path& dir)
{
    const auto path = dir / "token.key";
    if (std::filesystem::exists(path)) {
        auto s = std::string(text::trim(read_file(path)));
        if (!s.empty())
            return s;
    }
    auto s = generate_secret();
    std::filesystem::create_directories(dir);
    write_file_atomic(path, s + "\n");
    return s;
}

} // namespace fedlibre::gateway
