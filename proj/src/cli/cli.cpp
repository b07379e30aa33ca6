#include "fedlibre/cli/cli.hpp"

#include "fedlibre/gateway/api.hpp"
#include "fedlibre/gateway/export.hpp"
#include "fedlibre/gateway/server.hpp"
#include "fedlibre/harvester/harvest.hpp"
#include "fedlibre/indexer/index.hpp"
#include "fedlibre/store/checkpoint.hpp"
#include "fedlibre/store/record_store.hpp"
#include "fedlibre/store/source.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace fedlibre::cli {

namespace {

using json = nlohmann::json;

struct Globals {
    std::string store_dir;
    std::string vocab_dir;
    std::string config;
    std::string now;
    bool json = false;
    bool moderated = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Resolved configuration shared by every command.
class Session {
public:
    Session(const Globals& g)
        : config_(gateway::load_gateway_config(g.config.empty() ? std::nullopt
                                                                : std::optional<std::filesystem::path>(g.config)))
    {
        if (!g.store_dir.empty())
            config_.store_dir = g.store_dir;
        if (!g.vocab_dir.empty())
            config_.vocab_dir = g.vocab_dir;
        if (!g.now.empty()) {
            const auto t = parse_utc(g.now);
            if (!t)
                throw UsageError("--now expects YYYY-MM-DD or YYYY-MM-DDThh:mm:ssZ, got '" + g.now + "'");
            fixed_.emplace(*t);
        }
        vocabulary_ = vocabulary::Vocabulary::load(config_.vocab_dir);
        moderated_ = g.moderated;
    }

    const Clock& clock() const { return fixed_ ? static_cast<const Clock&>(*fixed_) : system_; }
    gateway::GatewayConfig& config() { return config_; }
    const std::filesystem::path& store_dir() const { return config_.store_dir; }
    const vocabulary::Vocabulary& vocabulary() const { return vocabulary_; }

    store::RecordStore open_store(bool read_only = false) const
    {
        store::StoreOptions o;
        o.clock = &clock();
        o.vocabulary = &vocabulary_;
        o.auto_publish = !moderated_;
        o.read_only = read_only;
        if (read_only && !std::filesystem::is_directory(config_.store_dir))
            throw Error(Errc::NotFound, "store directory " + config_.store_dir.string() + " does not exist");
        return store::RecordStore(config_.store_dir, o);
    }

    indexer::PostingsIndex load_index() const
    {
        try {
            return indexer::PostingsIndex::load(indexer::index_path(config_.store_dir));
        } catch (const Error& e) {
            if (e.code() == Errc::NotFound)
                throw Error(Errc::NotFound, "no index in " + config_.store_dir.string() + " (run `index rebuild`)");
            throw;
        }
    }

private:
    gateway::GatewayConfig config_;
    SystemClock system_;
    std::optional<FixedClock> fixed_;
    vocabulary::Vocabulary vocabulary_;
    bool moderated_ = false;
};

json report_json(const harvester::HarvestReport& r)
{
    return {{"sourceId", r.source_id},
            {"status", r.skipped ? "SKIPPED" : std::string(store::to_string(r.status))},
            {"added", r.added},
            {"updated", r.updated},
            {"unchanged", r.unchanged},
            {"markedDeleted", r.marked_deleted},
            {"errors", r.errors},
            {"requests", r.requests},
            {"from", r.from ? json(format_utc(*r.from)) : json(nullptr)},
            {"until", format_utc(r.until)},
            {"message", r.message}};
}

std::string report_line(const harvester::HarvestReport& r)
{
    if (r.skipped)
        return r.source_id + ": SKIPPED (" + r.message + ")";
    return r.source_id + ": " + std::string(store::to_string(r.status)) + " added=" + std::to_string(r.added) +
           " updated=" + std::to_string(r.updated) + " unchanged=" + std::to_string(r.unchanged) +
           " deleted=" + std::to_string(r.marked_deleted) + " errors=" + std::to_string(r.errors) +
           " requests=" + std::to_string(r.requests);
}

struct QueryArgs {
    std::string text;
    std::string mode = "all";
    std::vector<std::string> facets;
    std::size_t page = 1;
    std::size_t page_size = 20;
    std::string lang = "fr";

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--mode", mode, "all, any or phrase")->capture_default_str();
        cmd->add_option("--facet", facets, "FACET=term, repeatable");
        cmd->add_option("--page", page, "1-based result page")->capture_default_str();
        cmd->add_option("--page-size", page_size, "hits per page (1..100)")->capture_default_str();
        cmd->add_option("--lang", lang, "label language, fr or en")->capture_default_str();
    }

    std::vector<std::pair<std::string, std::string>> params() const
    {
        std::vector<std::pair<std::string, std::string>> p{{"q", text}, {"mode", mode}};
        for (const auto& f : facets)
            p.emplace_back("facet", f);
        p.emplace_back("page", std::to_string(page));
        p.emplace_back("pageSize", std::to_string(page_size));
        return p;
    }

    gateway::Lang language() const
    {
        const auto l = gateway::parse_lang(lang);
        if (!l)
            throw UsageError("--lang must be fr or en");
        return *l;
    }
};

void print_hits(std::ostream& out, const indexer::SearchQuery& q, const indexer::SearchResult& r)
{
    std::size_t key_width = 3;
    for (const auto& h : r.hits)
        key_width = std::max(key_width, h.key.size());
    out << std::setw(4) << "#" << "  " << std::left << std::setw(8) << "score" << "  " << std::setw(static_cast<int>(key_width))
        << "key" << "  title\n"
        << std::right;
    std::size_t rank = (q.page - 1) * q.page_size;
    for (const auto& h : r.hits) {
        std::ostringstream score;
        score << std::fixed << std::setprecision(4) << h.score;
        out << std::setw(4) << ++rank << "  " << std::left << std::setw(8) << score.str() << "  "
            << std::setw(static_cast<int>(key_width)) << h.key << "  " << h.title << "\n"
            << std::right;
    }
    out << r.total_hits << (r.total_hits == 1 ? " hit" : " hits") << ", page " << q.page << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, const CliContext& ctx)
{
    CLI::App app{"Federated open educational resource metadata: harvest, index, search and serve.", "fedlibre"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--store", g.store_dir, "store directory (default: storeDir of the config, else ./store)");
    app.add_option("--vocab-dir", g.vocab_dir, "directory overriding bundled vocabularies, stopwords and labels");
    app.add_option("--config", g.config, "gateway.json path (FEDORA_LIBRE_CONFIG takes precedence)");
    app.add_option("--now", g.now, "pin the clock, e.g. 2016-01-01T00:00:00Z");
    app.add_flag("--json", g.json, "machine-readable output");
    app.add_flag("--moderated", g.moderated, "harvested records wait for `publish` instead of going live");

    // sources
    auto* sources = app.add_subcommand("sources", "manage the source registry");
    sources->require_subcommand(1);
    store::SourceDescriptor add_desc;
    std::string add_nature = "public";
    std::string add_access = "open-free";
    std::string add_prefix = "oai_dc";
    std::optional<std::int64_t> add_count;
    auto* src_add = sources->add_subcommand("add", "register a partner repository");
    src_add->add_option("source-id", add_desc.source_id, "slug, e.g. unt-uved")->required();
    src_add->add_option("--name", add_desc.name, "portal name / acronym")->required();
    src_add->add_option("--url", add_desc.base_url, "OAI-PMH base URL")->required();
    src_add->add_option("--steward", add_desc.steward, "institution in charge");
    src_add->add_option("--nature", add_nature, "public, private or associative")->capture_default_str();
    src_add->add_option("--access", add_access, "open-free, free-registration or paid")->capture_default_str();
    src_add->add_option("--audience", add_desc.audience, "students, teachers, researchers, professionals, general-public");
    src_add->add_option("--language", add_desc.languages, "content language, repeatable");
    src_add->add_option("--declared-count", add_count, "resource count announced by the portal");
    src_add->add_option("--level", add_desc.levels, "academic level, repeatable");
    src_add->add_option("--prefix", add_prefix, "oai_dc or lom")->capture_default_str();
    auto* src_list = sources->add_subcommand("list", "list registered sources");
    std::string toggle_id;
    auto* src_disable = sources->add_subcommand("disable", "stop harvesting a source");
    src_disable->add_option("source-id", toggle_id)->required();
    auto* src_enable = sources->add_subcommand("enable", "resume harvesting a source");
    src_enable->add_option("source-id", toggle_id)->required();

    // harvest
    std::string harvest_id;
    bool full = false;
    unsigned parallel = 4;
    int politeness_ms = 1000;
    auto* harvest = app.add_subcommand("harvest", "incremental harvest of one source");
    harvest->add_option("source-id", harvest_id)->required();
    harvest->add_flag("--full", full, "ignore the checkpoint");
    harvest->add_option("--politeness", politeness_ms, "minimum milliseconds between requests")->capture_default_str();
    auto* harvest_all = app.add_subcommand("harvest-all", "harvest every enabled source");
    harvest_all->add_flag("--full", full, "ignore the checkpoints");
    harvest_all->add_option("--parallel", parallel, "concurrent sources")->capture_default_str()->check(CLI::Range(1u, 64u));
    harvest_all->add_option("--politeness", politeness_ms, "minimum milliseconds between requests")->capture_default_str();

    // index
    auto* index = app.add_subcommand("index", "search index maintenance");
    index->require_subcommand(1);
    auto* rebuild = index->add_subcommand("rebuild", "rebuild the index from the published records");

    // query
    QueryArgs qa;
    auto* query = app.add_subcommand("query", "search the index");
    query->add_option("text", qa.text, "query text (may be empty with --facet)")->required();
    qa.attach(query);

    // serve
    int port = -1;
    std::string bind;
    auto* serve = app.add_subcommand("serve", "run the HTTP gateway");
    serve->add_option("--port", port, "listening port (0 picks a free one)");
    serve->add_option("--bind", bind, "listening address");

    // export
    QueryArgs ea;
    std::string format;
    std::vector<std::string> keys;
    std::string output;
    auto* exp = app.add_subcommand("export", "export records by key or by query");
    exp->add_option("--format", format, "DC_XML, LOM_XML, CSV or BIBTEX")->required();
    exp->add_option("--key", keys, "record key, repeatable");
    exp->add_option("--query", ea.text, "export every hit of this query instead");
    exp->add_option("--output", output, "write to a file instead of stdout");
    ea.attach(exp);

    std::string publish_key;
    auto* publish = app.add_subcommand("publish", "make a moderated record public");
    publish->add_option("key", publish_key, "<sourceId>:<oaiIdentifier>")->required();

    auto* compact = app.add_subcommand("compact", "rewrite the record log with one line per record");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        ctx.out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        ctx.out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        ctx.err << "error: Usage: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        Session session(g);
        auto& out = ctx.out;

        if (sources->parsed()) {
            store::SourceRegistry registry(session.store_dir());
            if (src_add->parsed()) {
                add_desc.nature = store::parse_nature(add_nature);
                add_desc.access_mode = store::parse_access_mode(add_access);
                add_desc.declared_resource_count = add_count;
                const auto prefix = metadata::schema_from_prefix(add_prefix);
                if (!prefix)
                    throw Error(Errc::BadArgument, "--prefix must be oai_dc or lom");
                add_desc.metadata_prefix = *prefix;
                registry.add(add_desc);
                if (g.json)
                    out << json(add_desc).dump() << "\n";
                else
                    out << "added source " << add_desc.source_id << "\n";
            } else if (src_list->parsed()) {
                const auto all = registry.list();
                if (g.json) {
                    out << json(all).dump() << "\n";
                } else {
                    for (const auto& d : all)
                        out << d.source_id << "\t" << (d.enabled ? "enabled" : "disabled") << "\t"
                            << metadata::metadata_prefix(d.metadata_prefix) << "\t" << d.base_url << "\t" << d.name
                            << "\n";
                }
            } else {
                const bool enable = src_enable->parsed();
                registry.set_enabled(toggle_id, enable);
                out << (enable ? "enabled " : "disabled ") << toggle_id << "\n";
            }
            return kExitOk;
        }

        if (harvest->parsed() || harvest_all->parsed()) {
            const store::SourceRegistry registry(session.store_dir());
            std::unique_ptr<harvester::HttpTransport> owned;
            auto* transport = ctx.transport;
            if (!transport) {
                owned = harvester::make_http_transport();
                transport = owned.get();
            }
            harvester::HarvestOptions opts;
            opts.full = full;
            opts.clock = &session.clock();
            opts.client.politeness = std::chrono::milliseconds(std::max(0, politeness_ms));
            std::vector<harvester::HarvestReport> reports;
            {
                auto records = session.open_store();
                store::CheckpointStore checkpoints(session.store_dir());
                if (harvest->parsed())
                    reports.push_back(harvester::harvest_incremental(registry.get(harvest_id), records, checkpoints,
                                                                     *transport, opts));
                else
                    reports = harvester::harvest_all(registry, records, checkpoints, *transport, opts, parallel);
            }
            if (g.json) {
                json arr = json::array();
                for (const auto& r : reports)
                    arr.push_back(report_json(r));
                out << (harvest->parsed() ? arr[0] : arr).dump() << "\n";
            } else {
                for (const auto& r : reports)
                    out << report_line(r) << "\n";
            }
            int code = kExitOk;
            for (const auto& r : reports) {
                if (r.status == store::RunStatus::Failed) {
                    ctx.err << "error: " << r.message << " (source " << r.source_id << ")\n";
                    code = kExitFailure;
                }
            }
            return code;
        }

        if (rebuild->parsed()) {
            const auto records = session.open_store(true);
            const auto stopwords = indexer::load_stopwords(session.config().vocab_dir);
            indexer::BuildOptions opts;
            opts.reference = session.clock().now();
            opts.vocabulary = &session.vocabulary();
            opts.stopwords = &stopwords;
            const auto idx = indexer::build_index(records, opts);
            idx.save(indexer::index_path(session.store_dir()));
            if (g.json)
                out << json{{"documents", idx.doc_count()},
                            {"terms", idx.vocabulary_size()},
                            {"reference", format_utc(idx.reference())}}
                           .dump()
                    << "\n";
            else
                out << "indexed " << idx.doc_count() << " documents, " << idx.vocabulary_size() << " terms\n";
            return kExitOk;
        }

        if (query->parsed()) {
            const auto lang = qa.language();
            const auto idx = session.load_index();
            const auto q = gateway::parse_search_params(qa.params());
            const auto result = indexer::search(idx, q);
            if (g.json) {
                const gateway::Labels labels = gateway::Labels::load(session.config().vocab_dir);
                out << gateway::search_response(q, result, lang, labels, session.config().effective_public_url()).dump()
                    << "\n";
            } else {
                print_hits(out, q, result);
            }
            return kExitOk;
        }

        if (serve->parsed()) {
            auto config = session.config();
            if (port >= 0)
                config.port = port;
            if (!bind.empty())
                config.bind = bind;
            gateway::Gateway gw(config, &session.clock());
            const int bound = gw.start();
            out << "serving " << config.store_dir.string() << " on http://" << config.bind << ":" << bound << "\n"
                << std::flush;
            gw.wait();
            return kExitOk;
        }

        if (exp->parsed()) {
            const auto fmt = gateway::parse_export_format(format);
            const auto records = session.open_store(true);
            std::vector<std::string> wanted = keys;
            if (wanted.empty()) {
                if (ea.text.empty() && ea.facets.empty())
                    throw UsageError("export needs --key or --query/--facet");
                const auto idx = session.load_index();
                for (const auto& h : indexer::search_all(idx, gateway::parse_search_params(ea.params())))
                    wanted.push_back(h.key);
            }
            std::vector<store::RecordPtr> resolved;
            for (const auto& k : wanted) {
                auto r = records.find(RecordKey::parse(k));
                resolved.push_back(r && r->exposed() ? r : nullptr);
            }
            const auto result = gateway::export_records(resolved, fmt);
            for (const auto& [key, reason] : result.skipped)
                ctx.err << "note: skipped " << key << ": " << reason << "\n";
            if (output.empty())
                out << result.body;
            else
                write_file_atomic(output, result.body);
            return kExitOk;
        }

        if (publish->parsed()) {
            auto records = session.open_store();
            records.publish(RecordKey::parse(publish_key));
            records.sync();
            out << "published " << publish_key << "\n";
            return kExitOk;
        }

        if (compact->parsed()) {
            auto records = session.open_store();
            records.compact();
            if (g.json)
                out << json{{"records", records.size()}}.dump() << "\n";
            else
                out << "compacted " << records.size() << " records\n";
            return kExitOk;
        }
    } catch (const UsageError& e) {
        ctx.err << "error: Usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        ctx.err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        ctx.err << "error: Internal: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace fedlibre::cli
