// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include "fedlibre/gateway/export.hpp"
#include "fedlibre/gateway/oai_server.hpp"
#include "fedlibre/gateway/server.hpp"
#include "fedlibre/harvester/harvest.hpp"
#include "fedlibre/harvester/oai_client.hpp"
#include "fedlibre/indexer/index.hpp"
#include "fedlibre/metadata/crosswalk.hpp"
#include "fedlibre/metadata/namespaces.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"
#include "fedlibre/util/text.hpp"
#include "fedlibre/util/xml.hpp"

#include "support/fixtures.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <csignal>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

using namespace fedlibre;
using Clk = std::chrono::steady_clock;

namespace {

const Timestamp kBase = make_utc(2015, 6, 1);
const Timestamp kNow = make_utc(2016, 1, 1);

struct Outcome {
    bool ok = true;
    std::string detail;
};

/// Collects failed expectations; the first few are reported.
struct Check {
    std::vector<std::string> failures;
    void expect(bool cond, const std::string& what)
    {
        if (!cond)
            failures.push_back(what);
    }
    Outcome done(std::string detail) const
    {
        if (failures.empty())
            return {true, std::move(detail)};
        std::string msg = std::to_string(failures.size()) + " failure(s): ";
        for (std::size_t i = 0; i < failures.size() && i < 3; ++i)
            msg += (i ? "; " : "") + failures[i];
        return {false, msg};
    }
};

std::unique_ptr<store::RecordStore> open_store(const std::filesystem::path& dir, const Clock& clock)
{
    store::StoreOptions o;
    o.clock = &clock;
    return std::make_unique<store::RecordStore>(dir, o);
}

harvester::ClientOptions client_options(std::chrono::milliseconds politeness = std::chrono::milliseconds(0))
{
    harvester::ClientOptions o;
    o.politeness = politeness;
    o.backoff = std::chrono::milliseconds(1);
    o.retries = 0;
    return o;
}

store::SourceDescriptor source_a(const std::string& base_url)
{
    store::SourceDescriptor s;
    s.source_id = "a";
    s.name = "Instance A";
    s.base_url = base_url;
    s.steward = "test";
    s.metadata_prefix = metadata::SchemaTag::Lom;
    return s;
}

void compare_stores(Check& c, const store::RecordStore& a, const store::RecordStore& b)
{
    const auto lhs = a.list_all();
    const auto rhs = b.list_all();
    c.expect(lhs.size() == rhs.size(),
             "size " + std::to_string(lhs.size()) + " vs " + std::to_string(rhs.size()));
    for (std::size_t i = 0; i < std::min(lhs.size(), rhs.size()); ++i) {
        const auto& x = lhs[i]->envelope;
        const auto& y = rhs[i]->envelope;
        c.expect(x.oai_identifier == y.oai_identifier, "identifier " + x.oai_identifier);
        c.expect(x.datestamp == y.datestamp, "datestamp of " + x.oai_identifier);
        c.expect(x.deleted == y.deleted, "deleted flag of " + x.oai_identifier);
        c.expect(x.payload == y.payload, "payload of " + x.oai_identifier);
    }
}

/// Gateway over an external store, serving on an ephemeral loopback port.
struct Served {
    std::unique_ptr<gateway::Gateway> gw;
    std::string oai_url;

    Served(const store::RecordStore& s, const Clock& clock, std::size_t page_size)
    {
        gateway::GatewayConfig config;
        config.port = 0;
        config.token_secret = "acceptance-secret";
        config.oai.page_size = page_size;
        gw = std::make_unique<gateway::Gateway>(s, config, &clock);
        const int port = gw->start();
        oai_url = "http://127.0.0.1:" + std::to_string(port) + "/oai";
    }
    ~Served() { gw->stop(); }
};

std::string oai_error(const std::string& body)
{
    const auto root = xml::parse(body);
    const auto* e = root.child(ns::kOaiPmh, "error");
    return e ? *e->attribute("", "code") : std::string();
}

// ---------------------------------------------------------------------------
// Federation and incremental harvest over real HTTP

Outcome federation(bool incremental)
{
    Check c;
    fixtures::TempDir a_dir, b_dir;
    FixedClock a_clock(kNow), b_clock(kNow);
    auto a = open_store(a_dir.path(), a_clock);
    for (const auto& e : fixtures::federation_corpus("a", kBase))
        a->upsert(e);

    const auto started = Clk::now();
    Served served(*a, a_clock, 25);
    auto transport = harvester::make_http_transport();
    auto b = open_store(b_dir.path(), b_clock);
    store::CheckpointStore checkpoints(b_dir.path());
    harvester::HarvestOptions opts;
    opts.clock = &b_clock;
    opts.client = client_options(std::chrono::milliseconds(20));
    opts.client.source_id = "a";
    const auto source = source_a(served.oai_url);

    const auto first = harvester::harvest_incremental(source, *b, checkpoints, *transport, opts);
    const double seconds = std::chrono::duration<double>(Clk::now() - started).count();
    std::size_t dc = 0, lom = 0, deleted = 0;
    for (const auto& r : a->list_all()) {
        if (r->envelope.deleted)
            ++deleted;
        if (r->envelope.payload && r->envelope.payload->is_lom())
            ++lom;
        else if (r->envelope.payload)
            ++dc;
    }
    c.expect(a->size() == 100 && deleted == 5, "corpus shape");
    c.expect(first.status == store::RunStatus::Ok, "first run status: " + first.message);
    c.expect(first.added == 95 && first.marked_deleted == 5,
             "first run added=" + std::to_string(first.added) + " deleted=" + std::to_string(first.marked_deleted));
    compare_stores(c, *a, *b);

    if (!incremental) {
        c.expect(seconds < 10.0, "runtime " + std::to_string(seconds) + " s");
        std::ostringstream d;
        d << "100 records (" << dc << " oai_dc, " << lom << " LOM payloads, " << deleted << " deleted), "
          << first.requests << " HTTP requests, " << std::fixed << std::setprecision(2) << seconds << " s";
        return c.done(d.str());
    }

    // Advance five datestamps on A (three oai_dc, two LOM), then harvest again.
    const std::vector<int> moved{1, 2, 3, 61, 62};
    for (std::size_t i = 0; i < moved.size(); ++i) {
        auto e = a->get(RecordKey("a", "oai:fed:" + std::to_string(moved[i])))->envelope;
        e.datestamp = kNow + std::chrono::hours(6) + std::chrono::seconds(static_cast<int>(i));
        a->upsert(e);
    }
    b_clock.set(kNow + std::chrono::hours(24));
    const auto second = harvester::harvest_incremental(source, *b, checkpoints, *transport, opts);
    c.expect(second.status == store::RunStatus::Ok, "second run status: " + second.message);
    c.expect(second.updated == 5, "updated=" + std::to_string(second.updated));
    c.expect(second.added == 0, "added=" + std::to_string(second.added));
    compare_stores(c, *a, *b);
    return c.done("updated=" + std::to_string(second.updated) + " added=" + std::to_string(second.added) +
                  " unchanged=" + std::to_string(second.unchanged) + ", stores equal");
}

// ---------------------------------------------------------------------------
// OAI paging

Outcome paging()
{
    Check c;
    fixtures::TempDir dir;
    FixedClock clock(kNow);
    auto s = open_store(dir.path(), clock);
    for (int i = 0; i < 10; ++i)
        s->upsert(fixtures::envelope("a", "oai:p:" + std::to_string(i), kBase + std::chrono::hours(i),
                                     "Page " + std::to_string(i)));
    Served served(*s, clock, 3);
    auto transport = harvester::make_http_transport();

    std::vector<std::string> paged;
    std::size_t responses = 0;
    std::string query = "verb=ListRecords&metadataPrefix=oai_dc";
    bool last_had_token = true;
    while (responses < 20) {
        const auto body = transport->get(served.oai_url + "?" + query).body;
        ++responses;
        const auto root = xml::parse(body);
        const auto* list = root.child(ns::kOaiPmh, "ListRecords");
        if (!list) {
            c.expect(false, "response " + std::to_string(responses) + " has no ListRecords");
            break;
        }
        for (const auto* r : list->children_named(ns::kOaiPmh, "record"))
            paged.push_back(xml::extract(body, *r, root.declarations));
        const auto* token = list->child(ns::kOaiPmh, "resumptionToken");
        last_had_token = token != nullptr;
        if (!token || token->trimmed_text().empty())
            break;
        query = "verb=ListRecords&resumptionToken=" + text::url_encode(token->trimmed_text());
    }
    c.expect(responses == 4, "responses=" + std::to_string(responses));
    c.expect(!last_had_token, "final response carries a resumptionToken element");

    gateway::OaiServerConfig big;
    big.page_size = 1000;
    const gateway::OaiServer whole(*s, big, "acceptance-secret", &clock);
    const auto body = whole.handle({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}});
    const auto root = xml::parse(body);
    std::vector<std::string> single;
    if (const auto* list = root.child(ns::kOaiPmh, "ListRecords")) {
        c.expect(list->child(ns::kOaiPmh, "resumptionToken") == nullptr, "single listing has a token");
        for (const auto* r : list->children_named(ns::kOaiPmh, "record"))
            single.push_back(xml::extract(body, *r, root.declarations));
    }
    c.expect(single.size() == 10, "pageSize=1000 listing has " + std::to_string(single.size()) + " records");
    c.expect(paged == single, "concatenated pages differ from the single listing");
    return c.done(std::to_string(responses) + " responses, " + std::to_string(paged.size()) +
                  " records, concatenation equals the pageSize=1000 listing");
}

// ---------------------------------------------------------------------------
// Ranking oracle: a naive scan with its own weighting and phrase logic.

struct NaiveDoc {
    std::string key;
    std::vector<std::string> words; // lower-case, positions are indexes
};

double naive_weight(double tf, double df, double n)
{
    if (tf <= 0 || df <= 0)
        return 0.0;
    return (1.0 + std::log(tf)) * std::log(n / df);
}

struct NaiveHit {
    std::string key;
    double score;
};

std::vector<NaiveHit> naive_search(const std::vector<NaiveDoc>& docs, const std::vector<std::string>& query,
                                   const indexer::StopwordSet& stop, indexer::QueryMode mode)
{
    const double n = static_cast<double>(docs.size());
    std::map<std::string, double> df;
    for (const auto& d : docs) {
        std::set<std::string> seen;
        for (const auto& w : d.words)
            if (!stop.count(w))
                seen.insert(w);
        for (const auto& w : seen)
            df[w] += 1;
    }
    std::map<std::string, double> qtf;
    std::vector<std::pair<std::string, std::size_t>> qpos;
    for (std::size_t i = 0; i < query.size(); ++i)
        if (!stop.count(query[i])) {
            qtf[query[i]] += 1;
            qpos.emplace_back(query[i], i);
        }

    std::vector<NaiveHit> out;
    for (const auto& d : docs) {
        std::map<std::string, double> tf;
        for (const auto& w : d.words)
            if (!stop.count(w))
                tf[w] += 1;
        bool match = false;
        if (mode == indexer::QueryMode::AnyWord) {
            for (const auto& [t, _] : qtf)
                match = match || tf.count(t);
        } else if (mode == indexer::QueryMode::AllWords) {
            match = !qtf.empty();
            for (const auto& [t, _] : qtf)
                match = match && tf.count(t);
        } else {
            for (std::size_t start = 0; start < d.words.size() && !match && !qpos.empty(); ++start) {
                bool ok = true;
                for (const auto& [t, p] : qpos) {
                    const auto at = start + p - qpos.front().second;
                    ok = ok && at < d.words.size() && d.words[at] == t;
                }
                match = ok;
            }
        }
        if (!match)
            continue;
        double dot = 0, qn = 0, dn = 0;
        for (const auto& [t, f] : tf) {
            const double w = naive_weight(f, df[t], n);
            dn += w * w;
        }
        for (const auto& [t, f] : qtf) {
            const double wq = naive_weight(f, df.count(t) ? df[t] : 0, n);
            qn += wq * wq;
            if (tf.count(t))
                dot += wq * naive_weight(tf[t], df[t], n);
        }
        const double score = qn > 0 && dn > 0 ? dot / (std::sqrt(qn) * std::sqrt(dn)) : 0.0;
        out.push_back({d.key, score});
    }
    return out;
}

Outcome ranking()
{
    Check c;
    std::mt19937 rng(20240611);
    const std::vector<std::string> content{"alpha", "bravo", "delta", "echo",  "golf",
                                           "hotel", "india", "kilo",  "lima",  "oscar"};
    const std::vector<std::string> stop_words{"de", "la", "et", "le"};
    const auto& stop = indexer::default_stopwords();
    for (const auto& w : stop_words)
        if (!stop.count(w))
            return {false, "stopword list lacks '" + w + "'"};

    const auto word = [&] {
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0)
            return stop_words[std::uniform_int_distribution<std::size_t>(0, stop_words.size() - 1)(rng)];
        return content[std::uniform_int_distribution<std::size_t>(0, content.size() - 1)(rng)];
    };

    fixtures::TempDir dir;
    FixedClock clock(kNow);
    auto s = open_store(dir.path(), clock);
    std::vector<NaiveDoc> docs;
    for (int i = 0; i < 50; ++i) {
        NaiveDoc d;
        char key[16];
        std::snprintf(key, sizeof key, "%02d", i);
        d.key = std::string("r:oai:r:") + key;
        const int len = std::uniform_int_distribution<int>(1, 50)(rng);
        std::string title;
        for (int k = 0; k < len; ++k) {
            d.words.push_back(word());
            title += (k ? " " : "") + d.words.back();
        }
        s->upsert(fixtures::envelope("r", std::string("oai:r:") + key, kBase + std::chrono::minutes(i), title));
        docs.push_back(std::move(d));
    }
    const auto index = indexer::build_index(*s, {.reference = kNow});

    const std::vector<indexer::QueryMode> modes{indexer::QueryMode::ExactPhrase, indexer::QueryMode::AllWords,
                                                indexer::QueryMode::AnyWord};
    std::size_t matched[3] = {0, 0, 0};
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> q;
        const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
        if (kind <= 1) {
            // A window of some document, so phrases do match.
            const auto& d = docs[std::uniform_int_distribution<std::size_t>(0, docs.size() - 1)(rng)];
            const auto len = std::min<std::size_t>(d.words.size(), std::uniform_int_distribution<std::size_t>(1, 4)(rng));
            const auto at = std::uniform_int_distribution<std::size_t>(0, d.words.size() - len)(rng);
            q.assign(d.words.begin() + static_cast<long>(at), d.words.begin() + static_cast<long>(at + len));
        } else {
            const int len = std::uniform_int_distribution<int>(1, 4)(rng);
            for (int k = 0; k < len; ++k)
                q.push_back(kind == 3 && k == 0 ? std::string("zulu") : word());
        }
        std::string text;
        for (const auto& w : q)
            text += (text.empty() ? "" : " ") + w;
        const bool searchable = std::any_of(q.begin(), q.end(), [&](const auto& w) { return !stop.count(w); });

        std::set<std::string> sets[3];
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const auto mode_name = std::string(indexer::to_string(modes[m]));
            indexer::SearchQuery sq;
            sq.text = text;
            sq.mode = modes[m];
            std::vector<indexer::SearchHit> got;
            try {
                got = indexer::search_all(index, sq);
                c.expect(searchable, "'" + text + "' was accepted without searchable words");
            } catch (const Error& e) {
                c.expect(!searchable && e.code() == Errc::EmptyQuery, "'" + text + "' threw " + e.what());
                continue;
            }
            const auto want = naive_search(docs, q, stop, modes[m]);
            std::map<std::string, double> want_scores;
            for (const auto& h : want)
                want_scores[h.key] = h.score;
            c.expect(got.size() == want.size(), mode_name + " '" + text + "': " + std::to_string(got.size()) +
                                                    " hits vs naive " + std::to_string(want.size()));
            for (std::size_t i = 0; i < got.size(); ++i) {
                const auto it = want_scores.find(got[i].key);
                if (it == want_scores.end()) {
                    c.expect(false, mode_name + " '" + text + "': unexpected " + got[i].key);
                    continue;
                }
                const double diff = std::abs(it->second - got[i].score);
                worst = std::max(worst, diff);
                c.expect(diff <= 1e-9, mode_name + " '" + text + "': score of " + got[i].key);
                c.expect(got[i].score >= 0.0 && got[i].score <= 1.0, "score outside [0,1]");
                if (i > 0) {
                    const auto& p = got[i - 1];
                    c.expect(p.score > got[i].score || (p.score == got[i].score && p.key < got[i].key),
                             mode_name + " '" + text + "': order at " + std::to_string(i));
                }
                sets[m].insert(got[i].key);
            }
            matched[m] += got.size();
        }
        c.expect(std::includes(sets[1].begin(), sets[1].end(), sets[0].begin(), sets[0].end()),
                 "'" + text + "': EXACT_PHRASE not within ALL_WORDS");
        c.expect(std::includes(sets[2].begin(), sets[2].end(), sets[1].begin(), sets[1].end()),
                 "'" + text + "': ALL_WORDS not within ANY_WORD");
    }
    std::ostringstream d;
    d << "200 queries x 3 modes over 50 docs; hits phrase/all/any = " << matched[0] << "/" << matched[1] << "/"
      << matched[2] << ", max score error " << std::scientific << std::setprecision(1) << worst;
    return c.done(d.str());
}

// ---------------------------------------------------------------------------

Outcome tfidf_points()
{
    Check c;
    const double expected = (1.0 + std::log(2.0)) * std::log(3.0);
    c.expect(indexer::tfidf(0, 5, 10) == 0.0, "tf=0");
    c.expect(indexer::tfidf(1, 7, 7) == 0.0, "tf=1, df=N");
    const double got = indexer::tfidf(2, 1, 3);
    c.expect(std::abs(got - expected) <= 1e-12, "tf=2, df=1, N=3 gave " + std::to_string(got));
    std::ostringstream d;
    d << std::setprecision(15) << "tf=0 -> 0, tf=1,df=N -> 0, tf=2,df=1,N=3 -> " << got;
    return c.done(d.str());
}

// ---------------------------------------------------------------------------
// Facets

const std::vector<std::string> kDisciplines{
    "Economie et Gestion", "Environnement et développement durable", "Lettres, Arts, Langues et Civilisations",
    "Sciences de l'ingénieur", "Sciences fondamentales", "Sciences de la santé et du sport",
    "Sciences juridiques et politiques", "Sciences humaines, sociales, de l'éducation et de l'information"};
const std::vector<std::string> kResourceTypes{
    "cours / présentation", "exercice", "examen", "autoévaluation", "liste de références", "questionnaire",
    "démonstration", "expérience", "étude de cas", "évaluation", "animation", "autres", "simulation",
    "glossaire", "outil", "méthodologie", "guide", "tutoriel", "énoncé de problème", "scénario pédagogique",
    "jeu de données", "diaporama", "matériel de référence", "texte narratif", "index", "figure"};
const std::vector<std::string> kLevels{"enseignement supérieur", "formation professionnelle"};
const std::vector<std::string> kFormats{"vidéo", "texte", "ressource interactive", "image", "image fixe", "son",
                                        "ensemble de données", "collection", "logiciel", "objet physique",
                                        "évènement"};
const std::vector<std::string> kAges{"moins d'un an", "de 1 à 2 ans", "de 2 à 5 ans", "plus de 5 ans"};

const std::vector<std::string>& expected_terms(vocabulary::FacetId f)
{
    switch (f) {
    case vocabulary::FacetId::Discipline: return kDisciplines;
    case vocabulary::FacetId::ResourceType: return kResourceTypes;
    case vocabulary::FacetId::Level: return kLevels;
    case vocabulary::FacetId::Format: return kFormats;
    case vocabulary::FacetId::Age: break;
    }
    return kAges;
}

/// 1-based bucket from whole seconds, by year arithmetic on 365.25 days.
int naive_age_bucket(double days)
{
    const double years = days / 365.25;
    int bucket = 1;
    for (double edge : {1.0, 2.0, 5.0})
        bucket += years >= edge ? 1 : 0;
    return bucket;
}

Outcome facets()
{
    Check c;
    const auto& vocab = vocabulary::Vocabulary::builtin();
    std::string sizes;
    for (auto f : vocabulary::all_facets()) {
        const auto& terms = vocab.scheme(f).terms;
        c.expect(terms == expected_terms(f), std::string(vocabulary::to_string(f)) + " terms differ");
        sizes += (sizes.empty() ? "" : "/") + std::to_string(terms.size());
    }

    const std::vector<std::string> words{"orange", "citron", "pomme", "poire", "raisin"};
    std::size_t queries = 0, nonzero = 0;
    for (unsigned seed = 1; seed <= 3; ++seed) {
        std::mt19937 rng(seed * 7919);
        const auto pick = [&](const std::vector<std::string>& v) {
            return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
        };
        const auto coin = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng) == 0; };

        fixtures::TempDir dir;
        FixedClock clock(kNow);
        auto s = open_store(dir.path(), clock);
        struct Truth {
            std::string key;
            std::set<std::string> title_words;
            std::map<vocabulary::FacetId, std::set<std::string>> terms;
        };
        std::vector<Truth> truth;
        for (int i = 0; i < 500; ++i) {
            Truth t;
            const std::string id = "oai:f:" + std::to_string(i);
            t.key = "f:" + id;
            std::string title;
            for (int k = 0, n = std::uniform_int_distribution<int>(1, 3)(rng); k < n; ++k) {
                const auto w = pick(words);
                t.title_words.insert(w);
                title += (k ? " " : "") + w;
            }
            const auto age_seconds = std::uniform_int_distribution<std::int64_t>(0, 4000LL * 86400)(rng);
            const Timestamp datestamp = kNow - std::chrono::seconds(age_seconds);
            t.terms[vocabulary::FacetId::Age].insert(kAges[static_cast<std::size_t>(
                naive_age_bucket(static_cast<double>(age_seconds) / 86400.0) - 1)]);

            RecordEnvelope e;
            e.source_id = "f";
            e.oai_identifier = id;
            e.datestamp = datestamp;
            if (i % 2 == 0) {
                std::vector<std::pair<std::string, std::string>> el{{"title", title}};
                const auto add = [&](const char* element, vocabulary::FacetId f, const std::vector<std::string>& v) {
                    for (int k = std::uniform_int_distribution<int>(0, 2)(rng); k > 0; --k) {
                        const auto term = pick(v);
                        el.emplace_back(element, term);
                        t.terms[f].insert(term);
                    }
                };
                add("type", vocabulary::FacetId::ResourceType, kResourceTypes);
                add("format", vocabulary::FacetId::Format, kFormats);
                add("subject", vocabulary::FacetId::Discipline, kDisciplines);
                if (coin(4))
                    el.emplace_back("type", "zzqx");
                e.payload = metadata::MetadataPayload::parse(metadata::SchemaTag::OaiDc, fixtures::dc_xml(el));
            } else {
                fixtures::LomSpec spec;
                spec.title = title;
                const auto maybe = [&](std::string& field, vocabulary::FacetId f, const std::vector<std::string>& v) {
                    if (coin(3))
                        return;
                    field = pick(v);
                    t.terms[f].insert(field);
                };
                maybe(spec.resource_type, vocabulary::FacetId::ResourceType, kResourceTypes);
                maybe(spec.format, vocabulary::FacetId::Format, kFormats);
                maybe(spec.context, vocabulary::FacetId::Level, kLevels);
                maybe(spec.taxon, vocabulary::FacetId::Discipline, kDisciplines);
                e.payload = metadata::MetadataPayload::parse(metadata::SchemaTag::Lom, fixtures::lom_xml(spec));
            }
            s->upsert(e);
            truth.push_back(std::move(t));
        }
        const auto index = indexer::build_index(*s, {.reference = kNow});

        for (int trial = 0; trial < 50; ++trial) {
            indexer::SearchQuery q;
            q.mode = indexer::QueryMode::AnyWord;
            std::set<std::string> text_words;
            if (!coin(3))
                for (int k = std::uniform_int_distribution<int>(1, 2)(rng); k > 0; --k) {
                    const auto w = pick(words);
                    text_words.insert(w);
                    q.text += (q.text.empty() ? "" : " ") + w;
                }
            for (auto f : vocabulary::all_facets()) {
                if (!coin(3))
                    continue;
                for (int k = std::uniform_int_distribution<int>(1, 2)(rng); k > 0; --k)
                    q.facets[f].insert(pick(expected_terms(f)));
            }
            if (q.text.empty() && q.facets.empty())
                q.facets[vocabulary::FacetId::Age].insert(kAges[0]);

            std::vector<const Truth*> match;
            for (const auto& t : truth) {
                bool ok = text_words.empty();
                for (const auto& w : text_words)
                    ok = ok || t.title_words.count(w);
                for (const auto& [f, selected] : q.facets) {
                    bool any = false;
                    const auto it = t.terms.find(f);
                    for (const auto& term : selected)
                        any = any || (it != t.terms.end() && it->second.count(term));
                    ok = ok && any;
                }
                if (ok)
                    match.push_back(&t);
            }

            const auto result = indexer::search(index, q);
            ++queries;
            c.expect(result.total_hits == match.size(), "seed " + std::to_string(seed) + " trial " +
                                                            std::to_string(trial) + ": totalHits " +
                                                            std::to_string(result.total_hits) + " vs " +
                                                            std::to_string(match.size()));
            for (auto f : vocabulary::all_facets()) {
                const auto it = result.facet_counts.find(f);
                if (it == result.facet_counts.end()) {
                    c.expect(false, "missing facet group");
                    continue;
                }
                const auto& terms = expected_terms(f);
                c.expect(it->second.size() == terms.size(), "facet group size");
                for (std::size_t k = 0; k < std::min(terms.size(), it->second.size()); ++k) {
                    std::size_t want = 0;
                    for (const auto* t : match) {
                        const auto tt = t->terms.find(f);
                        want += tt != t->terms.end() && tt->second.count(terms[k]) ? 1 : 0;
                    }
                    nonzero += want ? 1 : 0;
                    c.expect(it->second[k].term == terms[k] && it->second[k].count == want,
                             std::string(vocabulary::to_string(f)) + "=" + terms[k] + ": " +
                                 std::to_string(it->second[k].count) + " vs naive " + std::to_string(want));
                }
            }
        }
    }
    return c.done("schemes " + sizes + "; " + std::to_string(queries) +
                  " queries on 3 corpora of 500 records, " + std::to_string(nonzero) + " non-zero counts checked");
}

Outcome age_buckets()
{
    Check c;
    for (const auto& [days, bucket] : std::vector<std::pair<int, int>>{{0, 1}, {400, 2}, {3000, 4}}) {
        const auto got = vocabulary::age_bucket_index(days) + 1;
        c.expect(static_cast<int>(got) == bucket, std::to_string(days) + " days -> " + std::to_string(got));
        const auto& term = vocabulary::age_bucket(kNow - std::chrono::hours(24 * days), kNow);
        c.expect(term == kAges[static_cast<std::size_t>(bucket - 1)], std::to_string(days) + " days -> " + term);
    }
    std::mt19937 rng(42);
    std::vector<double> ds;
    for (int i = 0; i < 10000; ++i)
        ds.push_back(std::uniform_real_distribution<double>(0.0, 10000.0)(rng));
    std::sort(ds.begin(), ds.end());
    std::size_t prev = 0;
    for (double d : ds) {
        const auto b = vocabulary::age_bucket_index(d);
        c.expect(b >= prev, "not monotone at " + std::to_string(d));
        c.expect(static_cast<int>(b) + 1 == naive_age_bucket(d), "bucket of " + std::to_string(d));
        prev = b;
    }
    return c.done("0/400/3000 days -> buckets 1/2/4; 10000 random ages monotone");
}

// ---------------------------------------------------------------------------
// Crosswalk and export round trips

std::size_t csv_columns_ok(const std::string& s, std::size_t& rows)
{
    std::size_t bad = 0, fields = 1;
    bool quoted = false;
    rows = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        if (quoted) {
            if (ch == '"' && i + 1 < s.size() && s[i + 1] == '"')
                ++i;
            else if (ch == '"')
                quoted = false;
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            ++fields;
        } else if (ch == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
            bad += fields == 16 ? 0 : 1;
            ++rows;
            fields = 1;
            ++i;
        }
    }
    return bad;
}

Outcome crosswalk_and_export()
{
    Check c;
    std::mt19937 rng(777);
    std::size_t titles = 0;
    for (int i = 0; i < 100; ++i) {
        const auto lom = fixtures::random_lom(rng);
        std::multiset<std::pair<std::string, std::string>> want, got;
        for (const auto& t : lom.general.title)
            want.insert({t.value, t.language});
        const auto dc = metadata::crosswalk_lom_to_dc(lom).dc;
        for (const auto& t : dc[metadata::DcElement::Title])
            got.insert({t.value, t.language});
        titles += want.size();
        c.expect(want == got, "title multiset of random record " + std::to_string(i));
    }

    fixtures::TempDir dir;
    FixedClock clock(kNow);
    auto s = open_store(dir.path(), clock);
    for (const auto& e : fixtures::federation_corpus("a", kBase))
        s->upsert(e);
    std::vector<store::RecordPtr> live;
    for (const auto& r : s->list_all())
        if (r->envelope.payload)
            live.push_back(r);

    const auto dc = gateway::export_records(live, gateway::ExportFormat::DcXml);
    const auto root = xml::parse(dc.body);
    const auto records = root.children_named(ns::kExport, "record");
    c.expect(records.size() == live.size(), "DC_XML record count");
    for (std::size_t i = 0; i < std::min(records.size(), live.size()); ++i) {
        const auto doc = xml::extract(dc.body, *records[i]->first_element_child(), root.declarations);
        c.expect(metadata::parse_dc(doc) == live[i]->envelope.payload->dc_view(),
                 "DC_XML reparse of " + live[i]->key.str());
    }

    const auto csv = gateway::export_records(live, gateway::ExportFormat::Csv);
    std::size_t rows = 0;
    const auto bad = csv_columns_ok(csv.body, rows);
    c.expect(bad == 0, std::to_string(bad) + " CSV rows without 16 columns");
    c.expect(rows == live.size() + 1, "CSV row count " + std::to_string(rows));
    return c.done("100 random LOM records (" + std::to_string(titles) + " titles) keep their title multiset; " +
                  std::to_string(records.size()) + " DC_XML records reparse equal; " + std::to_string(rows) +
                  " CSV rows of 16 columns");
}

// ---------------------------------------------------------------------------
// Store durability: a harvester killed between pages, then restarted.

std::string dump(const store::RecordStore& s)
{
    std::string out;
    for (const auto& r : s.list_all())
        out += store::serialize_record(*r) + "\n";
    return out;
}

Outcome durability()
{
    Check c;
    const std::string url = "http://a.example/oai";
    fixtures::TempDir a_dir, ref_dir, kill_dir;
    FixedClock clock(kNow);
    auto a = open_store(a_dir.path(), clock);
    for (const auto& e : fixtures::federation_corpus("a", kBase))
        a->upsert(e);
    gateway::OaiServerConfig config;
    config.base_url = url;
    config.page_size = 10;
    const gateway::OaiServer server(*a, config, "acceptance-secret", &clock);

    std::size_t served = 0;
    std::size_t kill_at = 0; // 0: never
    harvester::LoopbackTransport transport;
    transport.route(url, [&](const std::string& q) {
        if (kill_at && ++served == kill_at)
            ::raise(SIGKILL);
        gateway::QueryParams p;
        for (const auto& part : text::split(q, '&')) {
            const auto eq = part.find('=');
            p.emplace_back(text::url_decode(part.substr(0, eq)), text::url_decode(part.substr(eq + 1)));
        }
        return harvester::HttpResponse{200, server.handle(p), "text/xml", {}};
    });
    harvester::HarvestOptions opts;
    opts.clock = &clock;
    opts.client = client_options();
    opts.client.source_id = "a";
    const auto source = source_a(url);

    std::string reference;
    {
        auto ref = open_store(ref_dir.path(), clock);
        store::CheckpointStore cp(ref_dir.path());
        const auto r = harvester::harvest_incremental(source, *ref, cp, transport, opts);
        c.expect(r.status == store::RunStatus::Ok && r.requests > 4, "uninterrupted run");
        reference = dump(*ref);
    }

    std::cout.flush();
    const pid_t child = ::fork();
    if (child == 0) {
        kill_at = 4;
        auto k = open_store(kill_dir.path(), clock);
        store::CheckpointStore cp(kill_dir.path());
        harvester::harvest_incremental(source, *k, cp, transport, opts);
        ::_exit(0);
    }
    int status = 0;
    ::waitpid(child, &status, 0);
    c.expect(WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL, "harvester was not killed");

    // A crash mid-append also leaves a torn final line.
    {
        std::ofstream log(kill_dir.path() / "records.log", std::ios::app | std::ios::binary);
        log << "{\"key\":\"a:oai:fed:9";
    }
    std::size_t partial = 0;
    {
        auto k = open_store(kill_dir.path(), clock);
        partial = k->size();
        c.expect(partial > 0 && partial < 100, "killed run left " + std::to_string(partial) + " records");
        store::CheckpointStore cp(kill_dir.path());
        const auto before = cp.get("a");
        c.expect(!before || !before->last_successful_until, "checkpoint advanced by the killed run");
        const auto r = harvester::harvest_incremental(source, *k, cp, transport, opts);
        c.expect(r.status == store::RunStatus::Ok, "restarted run: " + r.message);
        c.expect(dump(*k) == reference, "restarted store differs from the uninterrupted run");
    }
    std::string first, second;
    {
        auto k = open_store(kill_dir.path(), clock);
        first = dump(*k);
    }
    {
        auto k = open_store(kill_dir.path(), clock);
        second = dump(*k);
    }
    c.expect(!first.empty() && first == second, "close/reopen list_all differs");
    return c.done("killed after " + std::to_string(partial) + " records, restart equals uninterrupted run (" +
                  std::to_string(reference.size()) + " bytes); reopen byte-identical");
}

// ---------------------------------------------------------------------------
// Protocol errors through the client against the server

/// Flips one character of any resumption token on the way out.
class TamperingTransport final : public harvester::HttpTransport {
public:
    explicit TamperingTransport(harvester::HttpTransport& inner) : inner_(inner) {}
    harvester::HttpResponse get(const std::string& url) override
    {
        auto u = url;
        const auto at = u.find("resumptionToken=");
        if (at != std::string::npos) {
            const auto p = at + std::string("resumptionToken=").size();
            u[p] = u[p] == 'A' ? 'B' : 'A';
            ++tampered;
        }
        return inner_.get(u);
    }
    std::size_t tampered = 0;

private:
    harvester::HttpTransport& inner_;
};

template <typename F>
std::string oai_code_of(F&& f)
{
    try {
        f();
    } catch (const OaiError& e) {
        return e.oai_code();
    } catch (const std::exception& e) {
        return std::string("exception: ") + e.what();
    }
    return "no error";
}

Outcome protocol_errors()
{
    Check c;
    fixtures::TempDir dir;
    FixedClock clock(kNow);
    auto s = open_store(dir.path(), clock);
    for (const auto& e : fixtures::federation_corpus("a", kBase))
        s->upsert(e);
    Served served(*s, clock, 10);
    auto http = harvester::make_http_transport();
    TamperingTransport tampering(*http);

    auto options = client_options();
    options.source_id = "a";
    harvester::OaiClient client(served.oai_url, *http, options);
    const auto unknown = oai_code_of([&] { client.get_record("oai:fed:none", "oai_dc"); });
    c.expect(unknown == "idDoesNotExist", "unknown identifier gave " + unknown);

    harvester::OaiClient tampered_client(served.oai_url, tampering, options);
    const auto tampered = oai_code_of([&] { tampered_client.list_records("oai_dc"); });
    c.expect(tampered == "badResumptionToken", "tampered token gave " + tampered);
    c.expect(tampering.tampered > 0, "no token was sent");

    const auto dc_only = oai_code_of([&] { client.get_record("oai:fed:1", "lom"); });
    c.expect(dc_only == "cannotDisseminateFormat", "lom of an oai_dc record gave " + dc_only);
    // The client refuses unknown prefixes before sending; the server is asked directly.
    const auto raw = oai_error(
        http->get(served.oai_url + "?verb=GetRecord&identifier=oai%3Afed%3A1&metadataPrefix=marc21").body);
    c.expect(raw == "cannotDisseminateFormat", "marc21 gave " + raw);
    const auto listed = oai_error(http->get(served.oai_url + "?verb=ListRecords&metadataPrefix=marc21").body);
    c.expect(listed == "cannotDisseminateFormat", "ListRecords marc21 gave " + listed);
    return c.done("idDoesNotExist, badResumptionToken, cannotDisseminateFormat");
}

} // namespace

int main()
{
    // Durability forks, so it runs before any server thread exists.
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"store-durability", durability},
        {"federation-round-trip", [] { return federation(false); }},
        {"incremental-harvest", [] { return federation(true); }},
        {"oai-paging", paging},
        {"ranking-oracle", ranking},
        {"tfidf-points", tfidf_points},
        {"facet-fidelity", facets},
        {"age-bucketing", age_buckets},
        {"crosswalk-export", crosswalk_and_export},
        {"protocol-errors", protocol_errors},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.ok ? 0 : 1;
        std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed ? 1 : 0;
}
