#include "fedlibre/gateway/server.hpp"

#include "fedlibre/gateway/export.hpp"
#include "fedlibre/store/source.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/resources.hpp"
#include "fedlibre/util/text.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace fedlibre::gateway {

using json = nlohmann::json;

std::string GatewayConfig::effective_public_url() const
{
    if (!public_url.empty())
        return public_url;
    return "http://" + (bind == "0.0.0.0" ? std::string("localhost") : bind) + ":" + std::to_string(port);
}

GatewayConfig parse_gateway_config(std::string_view json_text, const std::filesystem::path& base_dir)
{
    GatewayConfig c;
    c.oai.base_url.clear();
    try {
        const auto j = json::parse(json_text);
        if (!j.is_object())
            throw Error(Errc::Config, "gateway config must be a JSON object");
        const auto path = [&](const char* name) -> std::optional<std::filesystem::path> {
            if (!j.contains(name))
                return std::nullopt;
            std::filesystem::path p = j.at(name).get<std::string>();
            return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        };
        c.bind = j.value("bind", c.bind);
        c.port = j.value("port", c.port);
        if (c.port < 0 || c.port > 65535)
            throw Error(Errc::Config, "port out of range");
        if (auto p = path("storeDir"))
            c.store_dir = *p;
        c.vocab_dir = path("vocabDir");
        c.asset_dir = path("assetDir");
        c.public_url = j.value("publicUrl", c.public_url);
        c.token_secret = j.value("tokenSecret", c.token_secret);
        c.feed_limit = j.value("feedLimit", c.feed_limit);
        const auto oai = j.value("oai", json::object());
        c.oai.repository_name = oai.value("repositoryName", c.oai.repository_name);
        c.oai.base_url = oai.value("baseUrl", c.oai.base_url);
        c.oai.admin_email = oai.value("adminEmail", c.oai.admin_email);
        c.oai.page_size = oai.value("pageSize", c.oai.page_size);
        c.oai.token_ttl = std::chrono::seconds(oai.value("tokenTtl", c.oai.token_ttl.count()));
        if (c.oai.page_size < 1)
            throw Error(Errc::Config, "oai.pageSize must be at least 1");
        if (c.oai.token_ttl.count() < 1)
            throw Error(Errc::Config, "oai.tokenTtl must be at least 1 second");
    } catch (const json::exception& e) {
        throw Error(Errc::Config, std::string("gateway config: ") + e.what());
    }
    return c;
}

GatewayConfig load_gateway_config(const std::optional<std::filesystem::path>& path)
{
    std::optional<std::filesystem::path> file;
    if (const char* env = std::getenv("FEDORA_LIBRE_CONFIG"); env && *env)
        file = env;
    else if (path)
        file = *path;
    if (!file) {
        if (!std::filesystem::exists("gateway.json")) {
            GatewayConfig c;
            c.oai.base_url.clear();
            return c;
        }
        file = "gateway.json";
    }
    if (!std::filesystem::exists(*file))
        throw Error(Errc::Config, "config file " + file->string() + " does not exist");
    return parse_gateway_config(read_file(*file), file->parent_path());
}

namespace {

HttpReply json_reply(int status, const json& body)
{
    return {status, "application/json; charset=utf-8", body.dump() + "\n"};
}

HttpReply error_reply(int status, std::string_view code, std::string_view message)
{
    return json_reply(status, error_body(code, message));
}

int status_for(Errc code)
{
    switch (code) {
    case Errc::EmptyQuery:
    case Errc::BadPage:
    case Errc::BadArgument:
    case Errc::UnknownFormat: return 400;
    case Errc::NotFound:
    case Errc::EmptyExport:
    case Errc::UnknownSource: return 404;
    default: return 500;
    }
}

std::optional<std::string> param(const HttpRequest& r, std::string_view name)
{
    for (const auto& [k, v] : r.params)
        if (k == name)
            return v;
    return std::nullopt;
}

} // namespace

Gateway::Gateway(const store::RecordStore& store, GatewayConfig config, const Clock* clock, bool watch_index)
    : config_(std::move(config)),
      clock_(clock),
      owns_store_(false),
      watch_index_(watch_index),
      vocabulary_(vocabulary::Vocabulary::load(config_.vocab_dir)),
      labels_(Labels::load(config_.vocab_dir))
{
    secret_ = config_.token_secret.empty() ? load_or_create_secret(store.directory()) : config_.token_secret;
    view_.store = std::shared_ptr<const store::RecordStore>(&store, [](const store::RecordStore*) {});
    if (config_.oai.base_url.empty())
        config_.oai.base_url = config_.effective_public_url() + "/oai";
    view_.oai = std::make_shared<OaiServer>(*view_.store, config_.oai, secret_, clock_);
    refresh();
}

Gateway::Gateway(GatewayConfig config, const Clock* clock)
    : config_(std::move(config)),
      clock_(clock),
      owns_store_(true),
      watch_index_(true),
      vocabulary_(vocabulary::Vocabulary::load(config_.vocab_dir)),
      labels_(Labels::load(config_.vocab_dir))
{
    if (!std::filesystem::is_directory(config_.store_dir))
        throw Error(Errc::Config, "store directory " + config_.store_dir.string() + " does not exist");
    secret_ = config_.token_secret.empty() ? load_or_create_secret(config_.store_dir) : config_.token_secret;
    if (config_.oai.base_url.empty())
        config_.oai.base_url = config_.effective_public_url() + "/oai";
    refresh();
}

Gateway::~Gateway()
{
    stop();
}

void Gateway::set_index(std::shared_ptr<const indexer::PostingsIndex> index)
{
    index_.set(std::move(index));
}

void Gateway::refresh()
{
    const std::lock_guard lock(view_mutex_);
    const auto dir = owns_store_ || !view_.store ? config_.store_dir : view_.store->directory();
    std::error_code ec;
    const auto path = indexer::index_path(dir);
    std::optional<std::filesystem::file_time_type> mtime;
    if (watch_index_) {
        if (const auto t = std::filesystem::last_write_time(path, ec); !ec)
            mtime = t;
    }
    const bool index_changed = watch_index_ && mtime != index_mtime_;
    if (index_changed) {
        index_mtime_ = mtime;
        if (mtime) {
            try {
                index_.set(std::make_shared<const indexer::PostingsIndex>(indexer::PostingsIndex::load(path)));
            } catch (const Error&) {
                // Mid-write or corrupt: keep serving the previous snapshot.
                index_mtime_.reset();
            }
        }
    }
    std::optional<std::pair<std::filesystem::file_time_type, std::uintmax_t>> log_stamp;
    if (owns_store_) {
        const auto log = config_.store_dir / "records.log";
        const auto t = std::filesystem::last_write_time(log, ec);
        const auto size = ec ? 0 : std::filesystem::file_size(log, ec);
        if (!ec)
            log_stamp = std::pair{t, size};
    }
    if (owns_store_ && (index_changed || !view_.store || log_stamp != log_stamp_)) {
        log_stamp_ = log_stamp;
        store::StoreOptions options;
        options.read_only = true;
        options.clock = clock_;
        options.vocabulary = &vocabulary_;
        auto store = std::make_shared<const store::RecordStore>(config_.store_dir, options);
        view_.oai = std::make_shared<OaiServer>(*store, config_.oai, secret_, clock_);
        view_.store = std::move(store);
    }
}

Gateway::View Gateway::view()
{
    refresh();
    const std::lock_guard lock(view_mutex_);
    return view_;
}

HttpReply Gateway::handle(const HttpRequest& request)
{
    try {
        const auto v = view();
        return route(request, v);
    } catch (const Error& e) {
        return error_reply(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
        return error_reply(500, "Internal", e.what());
    }
}

HttpReply Gateway::route(const HttpRequest& request, const View& v)
{
    const auto& path = request.path;
    const auto public_url = config_.effective_public_url();

    Lang lang = Lang::Fr;
    if (const auto l = param(request, "lang")) {
        const auto parsed = parse_lang(*l);
        if (!parsed)
            return error_reply(400, "BadArgument", "lang must be fr or en");
        lang = *parsed;
    }

    if (path == "/oai") {
        if (request.method != "GET" && request.method != "POST")
            return error_reply(405, "MethodNotAllowed", "use GET or POST");
        return {200, "text/xml; charset=utf-8", v.oai->handle(request.params)};
    }
    if (request.method != "GET")
        return error_reply(405, "MethodNotAllowed", "the API is read-only");

    if (path == "/api/search") {
        const auto index = index_.get();
        if (!index)
            return error_reply(503, "IndexUnavailable", "no index has been built yet");
        const auto query = parse_search_params(request.params);
        const auto result = indexer::search(*index, query);
        return json_reply(200, search_response(query, result, lang, labels_, public_url));
    }
    if (path.starts_with("/api/records/")) {
        const auto key = RecordKey::parse(path.substr(std::string_view("/api/records/").size()));
        const auto r = v.store->find(key);
        if (!r || !r->exposed())
            return error_reply(404, "NotFound", "no record " + key.str());
        if (r->lifecycle == store::Lifecycle::Withdrawn) {
            auto body = error_body("Withdrawn", "record " + key.str() + " has been withdrawn");
            body["key"] = key.str();
            body["deletedAt"] = format_utc(r->envelope.datestamp);
            return json_reply(410, body);
        }
        const store::SourceRegistry registry(v.store->directory());
        return json_reply(200, record_detail(*r, registry.find(key.source_id()), lang, labels_, public_url));
    }
    if (path == "/api/facets")
        return json_reply(200, facets_response(vocabulary_, lang, labels_));
    if (path == "/api/sources") {
        const store::SourceRegistry registry(v.store->directory());
        json out = json::array();
        for (const auto& s : registry.list()) {
            json j = s;
            store::ListFilter filter;
            filter.lifecycle = store::Lifecycle::Published;
            filter.source_id = s.source_id;
            j["publishedRecords"] = v.store->list_all(filter).size();
            out.push_back(std::move(j));
        }
        return json_reply(200, json{{"sources", std::move(out)}});
    }
    if (path == "/api/export") {
        const auto format_name = param(request, "format");
        if (!format_name)
            return error_reply(400, "UnknownFormat", "format is required (DC_XML, LOM_XML, CSV, BIBTEX)");
        const auto format = parse_export_format(*format_name);
        std::vector<std::string> keys;
        for (const auto& [k, val] : request.params)
            if (k == "key")
                keys.push_back(val);
        if (keys.empty()) {
            const auto index = index_.get();
            if (!index)
                return error_reply(503, "IndexUnavailable", "no index has been built yet");
            for (const auto& h : indexer::search_all(*index, parse_search_params(request.params)))
                keys.push_back(h.key);
        }
        std::vector<store::RecordPtr> records;
        for (const auto& k : keys) {
            auto r = v.store->find(RecordKey::parse(k));
            records.push_back(r && r->exposed() ? r : nullptr);
        }
        const auto result = export_records(records, format);
        return {200, std::string(content_type(format)), result.body};
    }
    if (path == "/feed") {
        FeedOptions options;
        options.title = config_.oai.repository_name;
        options.public_url = public_url;
        options.limit = config_.feed_limit;
        if (const auto l = param(request, "limit")) {
            try {
                const auto n = std::stoll(*l);
                if (n < 0)
                    throw std::invalid_argument("negative");
                options.limit = static_cast<std::size_t>(n);
            } catch (const std::exception&) {
                return error_reply(400, "BadArgument", "limit must be a non-negative integer");
            }
        }
        store::ListFilter filter;
        filter.lifecycle = store::Lifecycle::Published;
        return {200, "application/rss+xml; charset=utf-8", rss_feed(v.store->list_all(filter), options)};
    }
    return error_reply(404, "NotFound", "no route for " + path);
}

void Gateway::install_routes()
{
    http_ = std::make_unique<httplib::Server>();
    if (config_.asset_dir && !http_->set_mount_point("/", config_.asset_dir->string()))
        throw Error(Errc::Config, "asset directory " + config_.asset_dir->string() + " does not exist");
    const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        HttpRequest r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params)
            r.params.emplace_back(k, v);
        const auto reply = handle(r);
        res.status = reply.status;
        res.set_content(reply.body, reply.content_type);
    };
    http_->Get("/oai", dispatch);
    http_->Post("/oai", dispatch);
    http_->Get("/feed", dispatch);
    http_->Get(R"(/api/.*)", dispatch);
}

int Gateway::start()
{
    install_routes();
    int port = config_.port;
    if (port == 0) {
        port = http_->bind_to_any_port(config_.bind);
    } else if (!http_->bind_to_port(config_.bind, port)) {
        port = -1;
    }
    if (port < 0)
        throw Error(Errc::Config, "cannot bind " + config_.bind + ":" + std::to_string(config_.port));
    if (config_.port == 0) {
        const bool derived_oai = config_.oai.base_url == config_.effective_public_url() + "/oai";
        config_.port = port;
        if (derived_oai) {
            config_.oai.base_url = config_.effective_public_url() + "/oai";
            const std::lock_guard lock(view_mutex_);
            if (view_.store)
                view_.oai = std::make_shared<OaiServer>(*view_.store, config_.oai, secret_, clock_);
        }
    }
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return port;
}

void Gateway::wait()
{
    if (thread_.joinable())
        thread_.join();
}

void Gateway::listen()
{
    start();
    wait();
}

void Gateway::stop()
{
    if (http_)
        http_->stop();
    if (thread_.joinable())
        thread_.join();
}

} // namespace fedlibre::gateway
